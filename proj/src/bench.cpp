#include "roa/bench.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "roa/shapes.hpp"

namespace roa::bench {

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

ShapeSpec ray_shape(double theta_deg, Eigen::MatrixXd N) {
  ShapeSpec s;
  s.center_mode = ShapeSpec::Center::ray;
  s.theta_deg = theta_deg;
  s.sigma = 0.8;
  s.N = std::move(N);
  return s;
}

ShapeSpec origin_shape(Eigen::MatrixXd N) {
  ShapeSpec s;
  s.center_mode = ShapeSpec::Center::origin;
  s.N = std::move(N);
  return s;
}

BenchmarkPreset make_vdp() {
  BenchmarkPreset p(2);
  p.name = "vdp";
  p.system.name = "vdp";
  p.system.nvars = 2;
  p.system.f = {Polynomial::from_string(2, "-x2"),
                Polynomial::from_string(2, "x1 + 5*x1^2*x2 - 5*x2")};
  const Eigen::MatrixXd N = mat2(1, 0, 0, 0.5);
  for (int round = 0; round < 3; ++round) {
    RoundConfig rc;
    for (double theta : {60.0, 209.0, 260.0}) rc.shapes.push_back(ray_shape(theta, N));
    p.rounds.push_back(std::move(rc));
  }
  p.box = Box{{-3, -3}, {3, 3}};
  p.sim.dt = 1e-3;
  p.sim.t_max = 150.0;  // slowest linear mode decays at rate ~0.209
  p.notes = "reversed Van der Pol; bounded ROA rimmed by an unstable limit cycle";
  return p;
}

BenchmarkPreset make_ex2() {
  BenchmarkPreset p(2);
  p.name = "ex2";
  p.system.name = "ex2";
  p.system.nvars = 2;
  p.system.f = {Polynomial::from_string(2, "-4*x1^3 + 6*x1^2 - 2*x1"),
                Polynomial::from_string(2, "-2*x2")};
  const Eigen::MatrixXd Na = mat2(5, 0, 0, 0.3);
  const Eigen::MatrixXd Nb = mat2(0.5, 0, 0, 1);
  const double thetas[3] = {132.0, 183.0, 234.0};
  const Eigen::MatrixXd* table[3][3] = {
      {&Na, &Na, &Na},
      {&Nb, &Nb, &Nb},
      {&Nb, &Na, &Nb},
  };
  for (int round = 0; round < 3; ++round) {
    RoundConfig rc;
    for (int i = 0; i < 3; ++i) rc.shapes.push_back(ray_shape(thetas[i], *table[round][i]));
    p.rounds.push_back(std::move(rc));
  }
  p.box = Box{{-4, -3}, {2, 3}};
  p.sim.dt = 1e-3;
  p.sim.t_max = 20.0;
  p.excluded_points = {{0.5, 0.0}, {1.0, 0.0}};
  p.notes = "two sinks split by the saddle at (0.5, 0); origin's ROA is the half-plane x1 < 0.5";
  return p;
}

BenchmarkPreset make_ex3() {
  BenchmarkPreset p(2);
  p.name = "ex3";
  p.system.name = "ex3";
  p.system.nvars = 2;
  p.system.f = {Polynomial::from_string(2, "-50*x1 - 16*x2 + 13.8*x1*x2"),
                Polynomial::from_string(2, "13*x1 - 9*x2 + 5.5*x1*x2")};
  {
    RoundConfig rc;
    rc.shapes.push_back(ray_shape(183.0, mat2(15, 0, 0, 0.3)));
    rc.shapes.push_back(ray_shape(183.0, mat2(14.47, 18.55, 18.55, 26.53)));
    rc.shapes.push_back(ray_shape(285.0, mat2(0.5, 0, 0, 12)));
    p.rounds.push_back(std::move(rc));
  }
  {
    RoundConfig rc;
    rc.shapes.push_back(ray_shape(178.0, mat2(1, 0, 0, 1)));
    rc.shapes.push_back(ray_shape(236.0, mat2(0.3, 0, 0, 1)));
    p.rounds.push_back(std::move(rc));
  }
  p.box = Box{{-8, -25}, {2, 20}};
  p.sim.dt = 1e-3;
  p.sim.t_max = 50.0;
  p.excluded_points = {ex3_saddle()};
  p.notes = "stiff coupled system; unbounded ROA with a saddle near (1.45, 18.17)";
  return p;
}

BenchmarkPreset make_ex4() {
  BenchmarkPreset p(3);
  p.name = "ex4";
  p.system.name = "ex4";
  p.system.nvars = 3;
  Polynomial f2 = Polynomial::from_string(3, "x3 - 2*x1^2");
  f2.add_term(Monomial({4, 0, 0}), 1.0 / 6.0);
  Polynomial f3 = Polynomial::from_string(3, "-x1 - 2*x2 - x3 + x2^3");
  f3.add_term(Monomial({0, 0, 3}), 1.0 / 15.0);
  f3.add_term(Monomial({0, 0, 5}), 1.0 / 25.0);
  p.system.f = {Polynomial::from_string(3, "x2 + x3^2"), std::move(f2), std::move(f3)};

  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(3, 3);
  N.diagonal() << 1.0, 0.5, 0.5;
  {
    RoundConfig rc;
    rc.shapes.push_back(origin_shape(N));
    p.rounds.push_back(std::move(rc));
  }
  for (int round = 0; round < 2; ++round) {
    RoundConfig rc;
    for (const AnglePair& a : cuboid_angles()) {
      ShapeSpec s = ray_shape(a.theta_deg, N);
      s.psi_deg = a.psi_deg;
      rc.shapes.push_back(std::move(s));
    }
    p.rounds.push_back(std::move(rc));
  }
  p.box = Box{{-4, -4, -4}, {4, 4, 4}};
  p.sim.dt = 5e-3;
  p.sim.t_max = 120.0;  // slowest linear mode decays at rate ~0.21
  p.notes = "3-D system; one origin ellipsoid, then the 14 cuboid directions per round";
  return p;
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"vdp", "ex2", "ex3", "ex4"};
  return n;
}

BenchmarkPreset get(const std::string& name) {
  if (name == "vdp") return make_vdp();
  if (name == "ex2") return make_ex2();
  if (name == "ex3") return make_ex3();
  if (name == "ex4") return make_ex4();
  throw std::invalid_argument("unknown benchmark preset: " + name);
}

std::vector<Summary> list() {
  std::vector<Summary> out;
  for (const std::string& n : names()) {
    BenchmarkPreset p = get(n);
    out.push_back({p.name, p.system.nvars, static_cast<int>(p.rounds.size()), p.notes});
  }
  return out;
}

std::vector<double> ex3_saddle() {
  // Eliminating x2 from f = 0 leaves 454.4*x1 = 658 on the nonzero branch.
  const double x1 = 658.0 / 454.4;
  const double x2 = 50.0 * x1 / (13.8 * x1 - 16.0);
  return {x1, x2};
}

}  // namespace roa::bench
