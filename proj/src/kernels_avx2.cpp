// AVX2 backend: four doubles per lane.  Built only on x86-64 and compiled
// with -mavx2 in isolation; plain multiply and add intrinsics are used (no
// FMA) so each lane matches the scalar kernel bit for bit.

#include <immintrin.h>

#include <cstring>

#include "kernels_impl.hpp"

namespace roa::kernels::detail {

struct Avx2Pack {
  static constexpr int width = 4;
  __m256d v;

  static Avx2Pack broadcast(double x) { return {_mm256_set1_pd(x)}; }
  static Avx2Pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, Avx2Pack a) { _mm256_storeu_pd(p, a.v); }
  static void store_partial(double* p, Avx2Pack a, int count) {
    if (count == width) {
      _mm256_storeu_pd(p, a.v);
    } else {
      double buf[width];
      _mm256_storeu_pd(buf, a.v);
      std::memcpy(p, buf, sizeof(double) * count);
    }
  }
  friend Avx2Pack operator+(Avx2Pack a, Avx2Pack b) { return {_mm256_add_pd(a.v, b.v)}; }
  friend Avx2Pack operator*(Avx2Pack a, Avx2Pack b) { return {_mm256_mul_pd(a.v, b.v)}; }
};

void eval_batch_avx2(const CompiledPoly& p, const double* const* xs, double* out, std::size_t n) {
  eval_batch_impl<Avx2Pack>(p, xs, out, n);
}

void integrate_batch_avx2(const CompiledSystem& sys, const double* x0, std::size_t n,
                          const SimParams& prm, SimStatus* status, double* final_norm,
                          double* final_time) {
  integrate_batch_impl<Avx2Pack>(sys, x0, n, prm, status, final_norm, final_time);
}

}  // namespace roa::kernels::detail
