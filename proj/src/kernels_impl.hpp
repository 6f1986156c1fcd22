#pragma once

// Shared kernel bodies, templated over a SIMD pack type.  Every backend
// instantiates the same code, which is what makes cross-backend results
// bitwise identical: the arithmetic sequence per point never changes, only
// how many points run side by side.

#include <cmath>
#include <cstring>
#include <vector>

#include "roa/kernels.hpp"

namespace roa::kernels::detail {

template <class Pack>
inline Pack eval_terms(const CompiledPoly& p, const Pack* x) {
  Pack acc = Pack::broadcast(0.0);
  const int nv = p.nvars;
  for (int t = 0; t < p.nterms; ++t) {
    Pack term = Pack::broadcast(p.coef[t]);
    const int* e = &p.expo[static_cast<std::size_t>(t) * nv];
    for (int v = 0; v < nv; ++v)
      for (int k = 0; k < e[v]; ++k) term = term * x[v];
    acc = acc + term;
  }
  return acc;
}

template <class Pack>
void eval_batch_impl(const CompiledPoly& p, const double* const* xs, double* out, std::size_t n) {
  constexpr int W = Pack::width;
  const int nv = p.nvars;
  Pack x[kMaxVars];
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    for (int v = 0; v < nv; ++v) x[v] = Pack::load(xs[v] + i);
    Pack::store_partial(out + i, eval_terms(p, x), W);
  }
  if (i < n) {
    const int rem = static_cast<int>(n - i);
    double buf[kMaxVars][Pack::width];
    for (int v = 0; v < nv; ++v) {
      for (int j = 0; j < W; ++j) buf[v][j] = xs[v][i + (j < rem ? j : rem - 1)];
      x[v] = Pack::load(buf[v]);
    }
    Pack::store_partial(out + i, eval_terms(p, x), rem);
  }
}

template <class Pack>
inline void rk4_step(const CompiledSystem& sys, Pack* y, double dt) {
  const int nv = sys.nvars;
  const Pack h2 = Pack::broadcast(dt * 0.5);
  const Pack h = Pack::broadcast(dt);
  const Pack h6 = Pack::broadcast(dt / 6.0);
  Pack k1[kMaxVars], k2[kMaxVars], k3[kMaxVars], k4[kMaxVars], t[kMaxVars];

  for (int v = 0; v < nv; ++v) k1[v] = eval_terms(sys.f[v], y);
  for (int v = 0; v < nv; ++v) t[v] = y[v] + h2 * k1[v];
  for (int v = 0; v < nv; ++v) k2[v] = eval_terms(sys.f[v], t);
  for (int v = 0; v < nv; ++v) t[v] = y[v] + h2 * k2[v];
  for (int v = 0; v < nv; ++v) k3[v] = eval_terms(sys.f[v], t);
  for (int v = 0; v < nv; ++v) t[v] = y[v] + h * k3[v];
  for (int v = 0; v < nv; ++v) k4[v] = eval_terms(sys.f[v], t);
  for (int v = 0; v < nv; ++v) {
    Pack s = k1[v] + k2[v];
    s = s + k2[v];
    s = s + k3[v];
    s = s + k3[v];
    s = s + k4[v];
    y[v] = y[v] + h6 * s;
  }
}

template <class Pack>
void integrate_batch_impl(const CompiledSystem& sys, const double* x0, std::size_t n,
                          const SimParams& prm, SimStatus* status, double* final_norm,
                          double* final_time) {
  constexpr int W = Pack::width;
  const int nv = sys.nvars;
  const double eps2 = prm.converge_eps * prm.converge_eps;
  const double esc2 = prm.escape_radius * prm.escape_radius;
  const long nsteps = static_cast<long>(std::ceil(prm.t_max / prm.dt - 1e-12));

  // Working set in structure-of-arrays form, padded so the last pack of a
  // partially filled group can load and store without bounds checks.
  std::vector<std::vector<double>> xs(nv, std::vector<double>(n + W, 0.0));
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = static_cast<std::uint32_t>(i);
    for (int v = 0; v < nv; ++v) xs[v][i] = x0[i * nv + v];
  }

  std::size_t active = n;
  long step = 0;
  double t_now = 0.0;
  while (true) {
    // Retire finished trajectories and compact the survivors to the front.
    std::size_t write = 0;
    for (std::size_t i = 0; i < active; ++i) {
      double n2 = 0.0;
      for (int v = 0; v < nv; ++v) n2 += xs[v][i] * xs[v][i];
      SimStatus st;
      if (n2 <= eps2)
        st = SimStatus::converged;
      else if (n2 >= esc2 || std::isnan(n2))
        st = SimStatus::escaped;
      else {
        if (write != i) {
          for (int v = 0; v < nv; ++v) xs[v][write] = xs[v][i];
          idx[write] = idx[i];
        }
        ++write;
        continue;
      }
      status[idx[i]] = st;
      final_norm[idx[i]] = std::sqrt(n2);
      final_time[idx[i]] = t_now;
    }
    active = write;
    if (active == 0 || step == nsteps) break;

    Pack y[kMaxVars];
    for (std::size_t i = 0; i < active; i += W) {
      for (int v = 0; v < nv; ++v) y[v] = Pack::load(xs[v].data() + i);
      rk4_step(sys, y, prm.dt);
      for (int v = 0; v < nv; ++v) Pack::store(xs[v].data() + i, y[v]);
    }
    ++step;
    t_now = static_cast<double>(step) * prm.dt;
  }

  for (std::size_t i = 0; i < active; ++i) {
    double n2 = 0.0;
    for (int v = 0; v < nv; ++v) n2 += xs[v][i] * xs[v][i];
    status[idx[i]] = SimStatus::timeout;
    final_norm[idx[i]] = std::sqrt(n2);
    final_time[idx[i]] = t_now;
  }
}

}  // namespace roa::kernels::detail
