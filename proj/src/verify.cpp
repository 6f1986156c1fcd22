#include "roa/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace roa {

namespace {

// Uniform in [0,1) from the top 53 bits of the generator, so that sampling
// does not depend on the standard library's distribution implementation.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * next_unit(rng);
}

// Box-Muller; consumes two uniforms per pair of normals.
void next_normal_pair(std::mt19937_64& rng, double& a, double& b) {
  double u1 = next_unit(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = next_unit(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  a = r * std::cos(kTwoPi * u2);
  b = r * std::sin(kTwoPi * u2);
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::size_t grid_size(int nvars, int resolution) {
  std::size_t n = 1;
  for (int i = 0; i < nvars; ++i) n *= static_cast<std::size_t>(resolution);
  return n;
}

// Coordinate arrays (structure of arrays) for every cell center.
std::vector<std::vector<double>> grid_coords(const Box& box, int resolution) {
  const int n = box.nvars();
  const std::size_t npts = grid_size(n, resolution);
  std::vector<std::vector<double>> coords(n, std::vector<double>(npts));
  std::vector<double> width(n);
  for (int d = 0; d < n; ++d) width[d] = (box.hi[d] - box.lo[d]) / resolution;
  for (std::size_t flat = 0; flat < npts; ++flat) {
    std::size_t rest = flat;
    for (int d = 0; d < n; ++d) {
      const std::size_t idx = rest % resolution;
      rest /= resolution;
      coords[d][flat] = box.lo[d] + (static_cast<double>(idx) + 0.5) * width[d];
    }
  }
  return coords;
}

std::vector<double> eval_on_grid(const Polynomial& V, const Box& box, int resolution) {
  const auto coords = grid_coords(box, resolution);
  const std::size_t npts = coords.front().size();
  std::vector<const double*> xs(coords.size());
  for (std::size_t d = 0; d < coords.size(); ++d) xs[d] = coords[d].data();
  std::vector<double> out(npts);
  kernels::eval_batch(kernels::CompiledPoly::compile(V), xs.data(), out.data(), npts);
  return out;
}

}  // namespace

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("box dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("box bounds must satisfy lo < hi");
}

double Box::volume() const {
  validate();
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

TrajectoryResult simulate(const DynamicalSystem& sys, const std::vector<double>& x0,
                          const kernels::SimParams& params) {
  if (static_cast<int>(x0.size()) != sys.nvars)
    throw std::invalid_argument("initial state dimension mismatch");
  kernels::BatchSimResult batch =
      kernels::integrate_batch(kernels::CompiledSystem::compile(sys), x0, params);
  TrajectoryResult r;
  r.converged = batch.status[0] == kernels::SimStatus::converged;
  r.escaped = batch.status[0] == kernels::SimStatus::escaped;
  r.final_norm = batch.final_norm[0];
  r.steps = std::llround(batch.final_time[0] / params.dt);
  return r;
}

std::vector<double> grid_point(const Box& box, int resolution, std::size_t flat) {
  const int n = box.nvars();
  std::vector<double> x(n);
  std::size_t rest = flat;
  for (int d = 0; d < n; ++d) {
    const std::size_t idx = rest % resolution;
    rest /= resolution;
    x[d] = box.lo[d] + (static_cast<double>(idx) + 0.5) * (box.hi[d] - box.lo[d]) / resolution;
  }
  return x;
}

OracleMask oracle_roa_mask(const DynamicalSystem& sys, const Box& box, int resolution,
                           const kernels::SimParams& params) {
  box.validate();
  if (box.nvars() != sys.nvars) throw std::invalid_argument("box dimension mismatch");
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");

  const int n = sys.nvars;
  const std::size_t npts = grid_size(n, resolution);
  const auto coords = grid_coords(box, resolution);
  std::vector<double> x0(npts * n);
  for (std::size_t i = 0; i < npts; ++i)
    for (int d = 0; d < n; ++d) x0[i * n + d] = coords[d][i];

  kernels::BatchSimResult batch =
      kernels::integrate_batch(kernels::CompiledSystem::compile(sys), x0, params);

  OracleMask out;
  out.resolution = resolution;
  out.mask.resize(npts);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < npts; ++i) {
    out.mask[i] = batch.status[i] == kernels::SimStatus::converged ? 1 : 0;
    hits += out.mask[i];
  }
  out.cell_volume = box.volume() / static_cast<double>(npts);
  out.area = static_cast<double>(hits) * out.cell_volume;
  return out;
}

CoverageReport coverage(const Polynomial& V, double gamma, const Box& box,
                        const OracleMask& oracle) {
  const std::vector<double> values = eval_on_grid(V, box, oracle.resolution);
  if (values.size() != oracle.mask.size())
    throw std::invalid_argument("oracle resolution does not match the box grid");

  CoverageReport rep;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > gamma) continue;
    ++inside;
    if (!oracle.mask[i]) ++rep.violations;
  }
  rep.estimated_area = static_cast<double>(inside) * oracle.cell_volume;
  rep.oracle_area = oracle.area;
  rep.ratio = oracle.area > 0 ? rep.estimated_area / oracle.area : 0.0;
  return rep;
}

double level_set_area(const Polynomial& V, double gamma, const Box& box, int resolution) {
  box.validate();
  const std::vector<double> values = eval_on_grid(V, box, resolution);
  std::size_t inside = 0;
  for (double v : values)
    if (v <= gamma) ++inside;
  return static_cast<double>(inside) * box.volume() / static_cast<double>(values.size());
}

double mc_union_volume(const std::vector<LevelSet>& sets, const Box& box, int n_samples,
                       std::uint64_t seed) {
  box.validate();
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::mt19937_64 rng(seed);
  const int n = box.nvars();
  std::vector<double> x(n);
  long long inside = 0;
  for (int s = 0; s < n_samples; ++s) {
    for (int d = 0; d < n; ++d) x[d] = next_in(rng, box.lo[d], box.hi[d]);
    for (const LevelSet& ls : sets) {
      if (ls.V.evaluate(x) <= ls.gamma) {
        ++inside;
        break;
      }
    }
  }
  return box.volume() * static_cast<double>(inside) / static_cast<double>(n_samples);
}

CertificateReport check_certificate(const Certificate& cert, const DynamicalSystem& sys,
                                    const Box& box, int n_samples, std::uint64_t seed,
                                    const kernels::SimParams& params) {
  box.validate();
  if (box.nvars() != sys.nvars || cert.nvars != sys.nvars)
    throw std::invalid_argument("certificate/system/box dimension mismatch");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");

  const int n = sys.nvars;
  const Polynomial& V = cert.V;
  const Polynomial lieV = lie_derivative(V, sys);
  const std::vector<Polynomial> grad = V.gradient();
  std::mt19937_64 rng(seed);

  CertificateReport rep;
  rep.samples_requested = n_samples;

  std::vector<double> sim_x0;
  std::vector<std::vector<double>> sim_pts;
  const long long max_attempts = 10000LL * n_samples;
  std::vector<double> x(n);
  while (rep.samples_accepted < n_samples && rep.attempts < max_attempts) {
    ++rep.attempts;
    for (int d = 0; d < n; ++d) x[d] = next_in(rng, box.lo[d], box.hi[d]);
    const double v = V.evaluate(x);
    if (v > cert.gamma) continue;
    ++rep.samples_accepted;

    const double r = norm2(x);
    if (r > 1e-9 && v <= 0.0) {
      ++rep.positivity_violations;
      rep.violations.push_back({"positivity", x, v});
    }
    if (r > kOriginBall) {
      const double dv = lieV.evaluate(x);
      if (dv >= 0.0) {
        ++rep.decrease_violations;
        rep.violations.push_back({"decrease", x, dv});
      }
    }

    double gn = 0.0;
    for (const Polynomial& g : grad) {
      const double gi = g.evaluate(x);
      gn += gi * gi;
    }
    gn = std::sqrt(gn);
    if (std::abs(v - cert.gamma) <= kBoundaryBand * gn) {
      ++rep.band_excluded;
    } else {
      sim_pts.push_back(x);
      sim_x0.insert(sim_x0.end(), x.begin(), x.end());
    }
  }

  if (!sim_pts.empty()) {
    kernels::BatchSimResult batch =
        kernels::integrate_batch(kernels::CompiledSystem::compile(sys), sim_x0, params);
    for (std::size_t i = 0; i < sim_pts.size(); ++i) {
      if (batch.status[i] != kernels::SimStatus::converged) {
        ++rep.convergence_violations;
        rep.violations.push_back({"convergence", sim_pts[i], batch.final_norm[i]});
      }
    }
  }

  // Shape regions must sit inside the level set; sample each one uniformly.
  const double slack = kContainmentSlack * std::max(1.0, std::abs(cert.gamma));
  for (const CertifiedShape& cs : cert.shapes) {
    Eigen::LLT<Eigen::MatrixXd> llt(cs.shape.N);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("shape matrix is not positive definite");
    const Eigen::MatrixXd Lt = llt.matrixL().transpose();
    const double sqrt_beta = std::sqrt(std::max(cs.beta, 0.0));

    Eigen::VectorXd z(n);
    for (int s = 0; s < n_samples; ++s) {
      for (int d = 0; d + 1 < n; d += 2) next_normal_pair(rng, z(d), z(d + 1));
      if (n % 2 == 1) {
        double a, b;
        next_normal_pair(rng, a, b);
        z(n - 1) = a;
      }
      const double zn = z.norm();
      const double radius = sqrt_beta * std::pow(next_unit(rng), 1.0 / n);
      Eigen::VectorXd zb = zn > 0 ? Eigen::VectorXd(z * (radius / zn)) : Eigen::VectorXd(z * 0.0);
      Eigen::VectorXd pt = cs.shape.center + Lt.triangularView<Eigen::Upper>().solve(zb);
      std::vector<double> px(pt.data(), pt.data() + n);
      const double v = V.evaluate(px);
      if (v > cert.gamma + slack) {
        ++rep.containment_violations;
        rep.violations.push_back({"containment", px, v});
      }
    }
  }
  return rep;
}

void write_mask_csv(const std::string& path, const Box& box, const OracleMask& oracle) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# resolution=" << oracle.resolution << "\n# box=";
  for (int d = 0; d < box.nvars(); ++d) {
    if (d) out << ";";
    out << format_double(box.lo[d]) << "," << format_double(box.hi[d]);
  }
  out << "\n";
  for (int d = 0; d < box.nvars(); ++d) out << "x" << d + 1 << ",";
  out << "in_roa\n";
  for (std::size_t i = 0; i < oracle.mask.size(); ++i) {
    const std::vector<double> x = grid_point(box, oracle.resolution, i);
    for (int d = 0; d < box.nvars(); ++d) out << format_double(x[d]) << ",";
    out << int(oracle.mask[i]) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace roa
