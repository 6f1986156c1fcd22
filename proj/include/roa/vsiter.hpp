#pragma once

// The V-s iteration: alternating SOS feasibility programs that grow a
// certified invariant sublevel set {V <= gamma}, optionally forced to contain
// a union of ellipsoidal shape regions {p_i <= beta_i}.  Multiple rounds
// re-seed the shape centers on the previous round's level set.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/poly.hpp"
#include "roa/sdp.hpp"
#include "roa/shapes.hpp"

namespace roa {

struct ShapeSpec {
  enum class Center { origin, ray };
  Center center_mode = Center::origin;
  double theta_deg = 0.0;
  double psi_deg = 0.0;  // used in three dimensions
  double sigma = 0.8;    // pulls a ray center inside the level set
  Eigen::MatrixXd N;
};

struct RoundConfig {
  std::vector<ShapeSpec> shapes;
  // Stop after the entry level computation, certifying the initial
  // candidate's own largest sublevel set (quadratic level-set mode).
  bool gamma_only = false;
};

struct IterationConfig {
  int deg_V = 6;  // even
  int deg_s0_min = 2, deg_s0_max = 4;
  int deg_si_min = 0, deg_si_max = 4;
  Polynomial l1, l2;  // positive-definite margins; default 1e-6 |x|^2
  double gamma_rel_tol = 1e-3;
  double beta_rel_tol = 1e-3;
  double beta_stall_tol = 1e-3;
  int max_iters = 100;
  SdpOptions sdp;

  explicit IterationConfig(int nvars) : l1(nvars), l2(nvars) {}
  static IterationConfig defaults(int nvars);
  // Degree bookkeeping that makes every program well posed; throws otherwise.
  void validate(const DynamicalSystem& sys, const std::vector<RoundConfig>& rounds) const;
};

class InfeasibleAtZero : public std::runtime_error {
 public:
  InfeasibleAtZero() : std::runtime_error("no multiplier certifies any positive level") {}
};

class ShapeInfeasible : public std::runtime_error {
 public:
  ShapeInfeasible(int index, double v_at_center, double gamma)
      : std::runtime_error("shape " + std::to_string(index) +
                           " admits no certified beta (V at center " +
                           std::to_string(v_at_center) + ", level " + std::to_string(gamma) + ")"),
        index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

struct CertifiedShape {
  ShapeFunction shape;
  double beta = 0.0;
  Polynomial s;

  CertifiedShape(ShapeFunction sh, double b, Polynomial mult)
      : shape(std::move(sh)), beta(b), s(std::move(mult)) {}
};

struct Certificate {
  std::string system_name;
  int nvars;
  Polynomial V;
  double gamma = 0.0;
  Polynomial s0;
  std::vector<CertifiedShape> shapes;
  int round_index = 1;
  int iterations = 0;
  bool global_stability = false;

  explicit Certificate(int n) : nvars(n), V(n), s0(n) {}
};

struct GammaStepResult {
  double gamma = 0.0;
  Polynomial s0;
  bool unbounded = false;
  int sdp_iters = 0;

  explicit GammaStepResult(int n) : s0(n) {}
};

struct BetaStepResult {
  double beta = 0.0;
  Polynomial s;
  int sdp_iters = 0;

  explicit BetaStepResult(int n) : s(n) {}
};

struct VStepResult {
  std::optional<Polynomial> V;
  int sdp_iters = 0;
};

// Largest gamma (to relative tolerance) whose sublevel set of V certifies
// decrease, together with the multiplier witness.  Starts at gamma = 1,
// doubles to bracket, then bisects; reports unbounded if the doubling cap
// (2^30) is reached feasibly.
GammaStepResult gamma_step(const DynamicalSystem& sys, const Polynomial& V,
                           const IterationConfig& cfg);

// Largest beta (to relative tolerance) with {p <= beta} certified inside
// {V <= gamma}.  seed_beta is a known-feasible lower bound (0 initially).
BetaStepResult beta_step(const DynamicalSystem& sys, const Polynomial& V, double gamma,
                         const Polynomial& p, const IterationConfig& cfg, double seed_beta,
                         int shape_index);

// Searches for a fresh V compatible with the fixed multipliers, levels and
// shape regions; empty when none exists.
VStepResult v_step(const DynamicalSystem& sys, double gamma, const Polynomial& s0,
                   const std::vector<CertifiedShape>& shapes, const IterationConfig& cfg);

struct TraceRow {
  int round = 0;
  int iter = 0;
  double gamma = 0.0;
  std::vector<double> betas;
  int sdp_iters_gamma = 0;
  int sdp_iters_beta = 0;
  int sdp_iters_v = 0;
};

enum class StopReason { v_step_infeasible, beta_stalled, max_iters, gamma_only, global_stability };

std::string stop_reason_name(StopReason r);

struct RoundResult {
  Certificate certificate;
  StopReason stop;
  std::vector<TraceRow> trace;

  RoundResult(Certificate c, StopReason r) : certificate(std::move(c)), stop(r) {}
};

RoundResult run_round(const DynamicalSystem& sys, const Polynomial& V_init,
                      const RoundConfig& round_cfg, const IterationConfig& cfg, int round_index);

struct MultiRoundResult {
  std::vector<RoundResult> rounds;
  std::vector<TraceRow> trace;

  const Certificate& final_certificate() const { return rounds.back().certificate; }
};

// Runs every configured round, threading the scaled V between rounds; the
// initial candidate comes from the linearization's Lyapunov equation.
MultiRoundResult run_multiround(const DynamicalSystem& sys, const std::vector<RoundConfig>& rounds,
                                const IterationConfig& cfg);

struct ReplayReport {
  bool ok = false;
  double max_residual = -1.0;
  std::vector<std::string> failures;
};

// Rebuilds every SOS membership the certificate asserts and re-solves them
// with the certificate's data fixed.
ReplayReport replay_certificate(const DynamicalSystem& sys, const Certificate& cert,
                                const IterationConfig& cfg);

}  // namespace roa
