#include "roa/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

#include "kernels_impl.hpp"

namespace roa::kernels {

CompiledPoly CompiledPoly::compile(const Polynomial& p) {
  if (p.nvars() > kMaxVars) throw std::invalid_argument("too many variables for kernels");
  CompiledPoly cp;
  cp.nvars = p.nvars();
  cp.nterms = static_cast<int>(p.terms().size());
  cp.coef.reserve(cp.nterms);
  cp.expo.reserve(static_cast<std::size_t>(cp.nterms) * cp.nvars);
  for (const auto& [m, c] : p.terms()) {
    cp.coef.push_back(c);
    for (int v = 0; v < cp.nvars; ++v) cp.expo.push_back(m.exponent(v));
  }
  return cp;
}

CompiledSystem CompiledSystem::compile(const DynamicalSystem& sys) {
  sys.validate();
  CompiledSystem cs;
  cs.nvars = sys.nvars;
  for (const Polynomial& fi : sys.f) cs.f.push_back(CompiledPoly::compile(fi));
  return cs;
}

namespace detail {

struct ScalarPack {
  static constexpr int width = 1;
  double v;

  static ScalarPack broadcast(double x) { return {x}; }
  static ScalarPack load(const double* p) { return {*p}; }
  static void store(double* p, ScalarPack a) { *p = a.v; }
  static void store_partial(double* p, ScalarPack a, int count) {
    if (count >= 1) *p = a.v;
  }
  friend ScalarPack operator+(ScalarPack a, ScalarPack b) { return {a.v + b.v}; }
  friend ScalarPack operator*(ScalarPack a, ScalarPack b) { return {a.v * b.v}; }
};

void eval_batch_scalar(const CompiledPoly& p, const double* const* xs, double* out,
                       std::size_t n) {
  eval_batch_impl<ScalarPack>(p, xs, out, n);
}

void integrate_batch_scalar(const CompiledSystem& sys, const double* x0, std::size_t n,
                            const SimParams& prm, SimStatus* status, double* final_norm,
                            double* final_time) {
  integrate_batch_impl<ScalarPack>(sys, x0, n, prm, status, final_norm, final_time);
}

#if ROA_HAVE_AVX2
void eval_batch_avx2(const CompiledPoly& p, const double* const* xs, double* out, std::size_t n);
void integrate_batch_avx2(const CompiledSystem& sys, const double* x0, std::size_t n,
                          const SimParams& prm, SimStatus* status, double* final_norm,
                          double* final_time);
#endif

}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if ROA_HAVE_AVX2 && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ROA_KERNEL_BACKEND")) {
    std::string s(env);
    if (s == "scalar") return Backend::scalar;
    if (s == "avx2" && cpu_has_avx2()) return Backend::avx2;
    return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = initial_backend();

}  // namespace

std::string backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::runtime_error("kernel backend unavailable: " + backend_name(b));
  g_backend = b;
}

void eval_batch(const CompiledPoly& p, const double* const* xs, double* out, std::size_t n) {
  if (n == 0) return;
#if ROA_HAVE_AVX2
  if (g_backend == Backend::avx2) {
    detail::eval_batch_avx2(p, xs, out, n);
    return;
  }
#endif
  detail::eval_batch_scalar(p, xs, out, n);
}

BatchSimResult integrate_batch(const CompiledSystem& sys, const std::vector<double>& x0,
                               const SimParams& prm) {
  if (x0.size() % sys.nvars != 0) throw std::invalid_argument("x0 size not a multiple of nvars");
  const std::size_t n = x0.size() / sys.nvars;
  BatchSimResult r;
  r.status.assign(n, SimStatus::timeout);
  r.final_norm.assign(n, 0.0);
  r.final_time.assign(n, 0.0);
  if (n == 0) return r;
#if ROA_HAVE_AVX2
  if (g_backend == Backend::avx2) {
    detail::integrate_batch_avx2(sys, x0.data(), n, prm, r.status.data(), r.final_norm.data(),
                                 r.final_time.data());
    return r;
  }
#endif
  detail::integrate_batch_scalar(sys, x0.data(), n, prm, r.status.data(), r.final_norm.data(),
                                 r.final_time.data());
  return r;
}

}  // namespace roa::kernels
