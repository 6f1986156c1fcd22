#include "roa/shapes.hpp"

#include <cmath>

namespace roa {

void ShapeFunction::validate() const {
  const int n = static_cast<int>(N.rows());
  if (N.cols() != n || center.size() != n) throw std::invalid_argument("dimension mismatch");
  if (!N.isApprox(N.transpose(), 1e-12)) throw std::invalid_argument("N must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(N);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("N must be positive definite");
}

Polynomial ShapeFunction::to_polynomial() const {
  validate();
  const int n = static_cast<int>(N.rows());
  std::vector<Polynomial> d;
  d.reserve(n);
  for (int i = 0; i < n; ++i)
    d.push_back(Polynomial::variable(n, i) - Polynomial::constant(n, center[i]));
  Polynomial p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p += d[i] * d[j] * N(i, j);
  return p;
}

double ShapeFunction::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd d = x - center;
  return d.dot(N * d);
}

Eigen::VectorXd direction_2d(double theta) {
  Eigen::VectorXd u(2);
  u << std::cos(theta), std::sin(theta);
  return u;
}

Eigen::VectorXd direction_3d(double theta, double psi) {
  Eigen::VectorXd u(3);
  u << std::cos(theta) * std::cos(psi), std::cos(theta) * std::sin(psi), std::sin(theta);
  return u;
}

namespace {

double eval_on_ray(const Polynomial& V, const Eigen::VectorXd& u, double r) {
  std::vector<double> x(u.size());
  for (int i = 0; i < u.size(); ++i) x[i] = r * u[i];
  return V.evaluate(x);
}

// Quadratic part of V along u, for the initial radius guess.
double quadratic_along(const Polynomial& V, const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  double q = 0;
  for (const auto& [m, c] : V.terms()) {
    if (m.degree() != 2) continue;
    double v = c;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < m.exponent(i); ++k) v *= u[i];
    q += v;
  }
  return q;
}

}  // namespace

double ray_level_intersection(const Polynomial& V, double gamma, const Eigen::VectorXd& u) {
  if (V.nvars() != u.size()) throw std::invalid_argument("dimension mismatch");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw std::invalid_argument("u must be a unit vector");

  // March until the level is crossed.  The step derives from the radius the
  // quadratic part alone would predict, so flat directions still resolve.
  const double q = quadratic_along(V, u);
  const double r_guess = q > 0 ? std::sqrt(gamma / q) : 1.0;
  const double step = 0.01 * r_guess;
  const double r_limit = 1e3 / u.cwiseAbs().maxCoeff();

  double lo = 0.0;   // V(lo u) - gamma < 0
  double hi = step;  // candidate crossing
  while (eval_on_ray(V, u, hi) - gamma < 0) {
    lo = hi;
    hi += step;
    if (hi > r_limit)
      throw NoIntersection("level " + std::to_string(gamma) +
                           " not crossed inside the search box along this ray");
  }

  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double g = eval_on_ray(V, u, mid) - gamma;
    if (std::abs(g) <= 1e-10) return mid;
    if (g < 0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

Eigen::VectorXd shifting_center(const Polynomial& V, double gamma, const Eigen::VectorXd& u,
                                double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in (0, 1)");
  return sigma * ray_level_intersection(V, gamma, u) * u;
}

const std::vector<AnglePair>& cuboid_angles() {
  // Eight cube vertices then six face centers.
  static const std::vector<AnglePair> angles = {
      {-45, -35}, {-45, 35}, {-135, -35}, {-135, 35}, {45, -35}, {45, 35}, {135, -35}, {135, 35},
      {0, 0},     {90, 0},   {180, 0},    {-90, 0},   {0, 90},   {0, -90},
  };
  return angles;
}

}  // namespace roa
