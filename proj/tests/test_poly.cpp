#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "roa/poly.hpp"

using namespace roa;

namespace {

// Uniform random polynomial of the given degree; deterministic per seed.
Polynomial random_poly(int nvars, int degree, std::mt19937& rng) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> expo(0, degree);
  Polynomial p(nvars);
  for (int t = 0; t < 12; ++t) {
    std::vector<int> e(nvars, 0);
    int budget = degree;
    for (int v = 0; v < nvars; ++v) {
      e[v] = std::min(budget, expo(rng));
      budget -= e[v];
    }
    p.add_term(Monomial(std::move(e)), coef(rng));
  }
  return p;
}

std::vector<double> random_point(int nvars, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::vector<double> x(nvars);
  for (double& xi : x) xi = d(rng);
  return x;
}

// Coefficient-wise comparison; addition order differs between the two sides
// of a ring identity, so the last ulp can differ.
bool approx_equal(const Polynomial& a, const Polynomial& b, double tol) {
  Polynomial d = a - b;
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("monomials reject negative exponents") {
  CHECK_THROWS_AS(Monomial({1, -1}), std::invalid_argument);
  CHECK(Monomial({2, 3}).degree() == 5);
}

TEST_CASE("terms iterate in ascending graded-lex order") {
  Polynomial p = Polynomial::from_string(2, "x1^2 + x2^3 + x1*x2 + 1 + x2");
  std::vector<int> degrees;
  for (const auto& [m, c] : p.terms()) degrees.push_back(m.degree());
  CHECK(std::is_sorted(degrees.begin(), degrees.end()));
  // Leading (printed first) term is the highest-degree one.
  CHECK(p.to_string().rfind("x2^3", 0) == 0);
}

TEST_CASE("ring identities hold coefficient-wise") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial p = random_poly(2, 4, rng);
    Polynomial q = random_poly(2, 3, rng);
    Polynomial r = random_poly(2, 2, rng);
    CHECK(approx_equal((p + q) * r, p * r + q * r, 1e-12));
    CHECK(approx_equal(p * q, q * p, 0.0));
    CHECK(approx_equal((p - q) + q, p, 1e-12));
    CHECK(approx_equal(p * Polynomial::constant(2, 1.0), p, 0.0));
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial p = random_poly(3, 3, rng);
    Polynomial q = random_poly(3, 3, rng);
    std::vector<double> x = random_point(3, rng);
    CHECK((p + q).evaluate(x) == doctest::Approx(p.evaluate(x) + q.evaluate(x)).epsilon(1e-10));
    CHECK((p * q).evaluate(x) == doctest::Approx(p.evaluate(x) * q.evaluate(x)).epsilon(1e-10));
  }
}

TEST_CASE("derivative of x1^3*x2 is 3*x1^2*x2") {
  Polynomial p = Polynomial::from_string(2, "x1^3*x2");
  CHECK(p.derivative(0) == Polynomial::from_string(2, "3*x1^2*x2"));
  CHECK(p.derivative(1) == Polynomial::from_string(2, "x1^3"));
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937 rng(13);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial p = random_poly(2, 5, rng);
    std::vector<Polynomial> g = p.gradient();
    std::vector<double> x = random_point(2, rng);
    for (int v = 0; v < 2; ++v) {
      std::vector<double> hi = x, lo = x;
      hi[v] += h;
      lo[v] -= h;
      double fd = (p.evaluate(hi) - p.evaluate(lo)) / (2 * h);
      CHECK(g[v].evaluate(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("directional derivative along a vector field") {
  // d/dt of x1^2*x2 along (-x1, x2): 2*x1*x2*(-x1) + x1^2*x2 = -x1^2*x2.
  DynamicalSystem sys;
  sys.name = "hand";
  sys.nvars = 2;
  sys.f = {Polynomial::from_string(2, "-x1"), Polynomial::from_string(2, "x2")};
  sys.validate();
  Polynomial v = Polynomial::from_string(2, "x1^2*x2");
  CHECK(lie_derivative(v, sys) == Polynomial::from_string(2, "-x1^2*x2"));

  // Cross-check on a random polynomial: chain rule against finite differences
  // along the flow direction.
  std::mt19937 rng(17);
  Polynomial p = random_poly(2, 4, rng);
  Polynomial lp = lie_derivative(p, sys);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x = random_point(2, rng);
    std::vector<double> f = {sys.f[0].evaluate(x), sys.f[1].evaluate(x)};
    const double eps = 1e-6;
    std::vector<double> fwd = {x[0] + eps * f[0], x[1] + eps * f[1]};
    std::vector<double> bwd = {x[0] - eps * f[0], x[1] - eps * f[1]};
    double fd = (p.evaluate(fwd) - p.evaluate(bwd)) / (2 * eps);
    CHECK(lp.evaluate(x) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("text form round-trips exactly") {
  std::mt19937 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    Polynomial p = random_poly(2, 6, rng);
    CHECK(Polynomial::from_string(2, p.to_string()) == p);
  }
  Polynomial z(2);
  CHECK(z.to_string() == "0");
  CHECK(Polynomial::from_string(2, "0") == z);
  // Tiny scientific-notation coefficients survive the trip.
  Polynomial margin = Polynomial::from_string(2, "1e-06*x1^2 + 1e-06*x2^2");
  CHECK(Polynomial::from_string(2, margin.to_string()) == margin);
}

TEST_CASE("parser accepts products and signs, rejects malformed text") {
  CHECK(Polynomial::from_string(2, "2*x1*x2^2 - x1") ==
        Polynomial::from_string(2, "-x1 + 2*x2^2*x1"));
  CHECK(Polynomial::from_string(2, "0.5*2*x1") == Polynomial::from_string(2, "x1"));
  CHECK_THROWS_AS(Polynomial::from_string(2, "x3"), std::invalid_argument);
  CHECK_THROWS_AS(Polynomial::from_string(2, "x1 +"), std::invalid_argument);
  CHECK_THROWS_AS(Polynomial::from_string(2, ""), std::invalid_argument);
}

TEST_CASE("format_double round-trips through parsing") {
  for (double v : {0.36, 1.0 / 3.0, 2.7, -0.5, 1e-6, 6.02e23, -3.0, 0.1 + 0.2}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("vector fields must vanish at the origin") {
  DynamicalSystem sys;
  sys.name = "bad";
  sys.nvars = 2;
  sys.f = {Polynomial::from_string(2, "x2 + 1"), Polynomial::from_string(2, "-x1")};
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}
