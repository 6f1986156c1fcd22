#pragma once

// SOS-free validation of estimation results: a brute-force trajectory oracle
// for the true region of attraction, sampling checks on certificates, and
// coverage / volume metrics.  Everything here is deterministic given (seed,
// resolution).

#include <cstdint>
#include <string>
#include <vector>

#include "roa/kernels.hpp"
#include "roa/poly.hpp"
#include "roa/vsiter.hpp"

namespace roa {

// Axis-aligned sampling/verification box.
struct Box {
  std::vector<double> lo, hi;

  int nvars() const { return static_cast<int>(lo.size()); }
  void validate() const;
  double volume() const;
};

struct TrajectoryResult {
  bool converged = false;
  bool escaped = false;
  double final_norm = 0.0;
  long long steps = 0;
};

TrajectoryResult simulate(const DynamicalSystem& sys, const std::vector<double>& x0,
                          const kernels::SimParams& params);

// Convergence mask over cell centers of a resolution^n grid; the first
// coordinate varies fastest.  Trajectories that settle anywhere other than
// the origin never reach the convergence ball and count as outside.
struct OracleMask {
  int resolution = 0;
  std::vector<std::uint8_t> mask;  // 1 = converged to the origin
  double cell_volume = 0.0;
  double area = 0.0;               // converged cells * cell volume
};

OracleMask oracle_roa_mask(const DynamicalSystem& sys, const Box& box, int resolution,
                           const kernels::SimParams& params);

// Cell center of the flat grid index (first coordinate fastest).
std::vector<double> grid_point(const Box& box, int resolution, std::size_t flat);

struct CoverageReport {
  double estimated_area = 0.0;  // volume of {V <= gamma} by cell counting
  double oracle_area = 0.0;
  double ratio = 0.0;           // estimated / oracle
  long long violations = 0;     // certified cells whose trajectory diverges
};

CoverageReport coverage(const Polynomial& V, double gamma, const Box& box,
                        const OracleMask& oracle);

// Volume of {V <= gamma} alone, by cell counting on a fresh grid.
double level_set_area(const Polynomial& V, double gamma, const Box& box, int resolution);

// Monte-Carlo volume of a union of sublevel sets.  A fixed (seed, box,
// n_samples) triple always draws the same points, so volumes of different
// certificates compare on paired samples.
struct LevelSet {
  Polynomial V;
  double gamma = 0.0;
};
double mc_union_volume(const std::vector<LevelSet>& sets, const Box& box, int n_samples,
                       std::uint64_t seed);

struct Violation {
  std::string kind;  // positivity | decrease | containment | convergence
  std::vector<double> x;
  double value = 0.0;
};

struct CertificateReport {
  int samples_requested = 0;
  int samples_accepted = 0;
  long long attempts = 0;
  int band_excluded = 0;  // too close to {V = gamma} for trajectory checks
  int positivity_violations = 0;
  int decrease_violations = 0;
  int convergence_violations = 0;
  int containment_violations = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Points closer to {V = gamma} than this (first-order distance
// |V - gamma| / |grad V|) are excluded from trajectory assertions.
inline constexpr double kBoundaryBand = 1e-3;
// Trajectory checks apply outside this ball around the origin.
inline constexpr double kOriginBall = 1e-3;
// Numerical grace on V <= gamma for points sampled inside a shape region.
inline constexpr double kContainmentSlack = 1e-6;

// Rejection-samples n points of {V <= gamma} inside the box and asserts the
// certificate's claims pointwise: V > 0 off the origin, dV/dt < 0 off the
// origin ball, trajectories converge (off the boundary band), and each shape
// region sits inside the level set (n samples per shape).
CertificateReport check_certificate(const Certificate& cert, const DynamicalSystem& sys,
                                    const Box& box, int n_samples, std::uint64_t seed,
                                    const kernels::SimParams& params);

// CSV export of an oracle mask: one row per cell, "x1,...,xn,in_roa", with a
// header comment recording the box and resolution.
void write_mask_csv(const std::string& path, const Box& box, const OracleMask& oracle);

}  // namespace roa
