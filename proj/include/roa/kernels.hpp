#pragma once

// Flattened polynomial evaluation and fixed-step RK4 integration over batches
// of points.  A scalar reference kernel and an AVX2 kernel are selected at
// runtime; both run identical arithmetic in identical order, so results are
// bitwise equal regardless of which backend executes.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "roa/poly.hpp"

namespace roa::kernels {

// Kernels are specialized for small state dimensions.
inline constexpr int kMaxVars = 8;

// Term-major flattened form of a Polynomial for tight evaluation loops.
struct CompiledPoly {
  int nvars = 0;
  int nterms = 0;
  std::vector<double> coef;  // nterms
  std::vector<int> expo;     // nterms * nvars

  static CompiledPoly compile(const Polynomial& p);
};

struct CompiledSystem {
  int nvars = 0;
  std::vector<CompiledPoly> f;

  static CompiledSystem compile(const DynamicalSystem& sys);
};

enum class Backend { scalar, avx2 };

std::string backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
// Overrides dispatch for tests; the ROA_KERNEL_BACKEND environment variable
// ("scalar" | "avx2") does the same at startup.  Throws if unavailable.
void set_backend(Backend b);

// xs holds nvars pointers to n-long coordinate arrays (structure of arrays).
void eval_batch(const CompiledPoly& p, const double* const* xs, double* out, std::size_t n);

enum class SimStatus : std::uint8_t { timeout = 0, converged = 1, escaped = 2 };

struct SimParams {
  double dt = 1e-3;
  double t_max = 50.0;
  double converge_eps = 1e-4;  // |x| at or below this reaches the origin
  double escape_radius = 1e3;  // |x| at or above this diverges
};

struct BatchSimResult {
  std::vector<SimStatus> status;
  std::vector<double> final_norm;  // |x| when the trajectory terminated
  std::vector<double> final_time;
};

// Integrates every initial state (point-major, n * nvars) until it converges,
// escapes, or t_max elapses.  Finished trajectories retire from the batch so
// long-lived ones do not pay for them.
BatchSimResult integrate_batch(const CompiledSystem& sys, const std::vector<double>& x0,
                               const SimParams& params);

}  // namespace roa::kernels
