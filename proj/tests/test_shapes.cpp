#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "roa/shapes.hpp"

using namespace roa;

TEST_CASE("shape functions validate their matrix") {
  Eigen::MatrixXd N(2, 2);
  N << 1.0, 0.0, 0.0, -0.5;  // not positive definite
  ShapeFunction bad{N, Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  N << 1.0, 0.3, 0.2, 1.0;  // not symmetric
  ShapeFunction skew{N, Eigen::VectorXd::Zero(2)};
  CHECK_THROWS_AS(skew.validate(), std::invalid_argument);
}

TEST_CASE("shape polynomials expand the centered quadratic") {
  Eigen::MatrixXd N(2, 2);
  N << 1.0, 0.0, 0.0, 0.5;
  Eigen::VectorXd c(2);
  c << 0.3, -0.1;
  ShapeFunction sf{N, c};
  sf.validate();
  Polynomial p = sf.to_polynomial();
  CHECK(p.evaluate({0.3, -0.1}) == doctest::Approx(0.0));
  for (double x1 : {-1.0, 0.0, 0.7}) {
    for (double x2 : {-0.4, 0.2}) {
      double direct = (x1 - 0.3) * (x1 - 0.3) + 0.5 * (x2 + 0.1) * (x2 + 0.1);
      CHECK(p.evaluate({x1, x2}) == doctest::Approx(direct).epsilon(1e-12));
      Eigen::VectorXd x(2);
      x << x1, x2;
      CHECK(sf.evaluate(x) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("planar and spatial directions are unit vectors") {
  Eigen::VectorXd u = direction_2d(M_PI / 3.0);
  CHECK(u(0) == doctest::Approx(0.5));
  CHECK(u(1) == doctest::Approx(std::sqrt(3.0) / 2.0));

  // Azimuth pi/2 with zero elevation points along x2; elevation pi/2 points
  // along x3.
  Eigen::VectorXd v = direction_3d(0.0, M_PI / 2.0);
  CHECK(v(0) == doctest::Approx(0.0));
  CHECK(v(1) == doctest::Approx(1.0));
  CHECK(v(2) == doctest::Approx(0.0));
  Eigen::VectorXd w = direction_3d(M_PI / 2.0, 0.0);
  CHECK(w(2) == doctest::Approx(1.0));
  CHECK(w.norm() == doctest::Approx(1.0));
}

TEST_CASE("rays meet quadratic level sets where expected") {
  Polynomial ball = Polynomial::from_string(2, "x1^2 + x2^2");
  Eigen::VectorXd u = direction_2d(1.1);
  double r = ray_level_intersection(ball, 4.0, u);
  CHECK(r == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(ball.evaluate({r * u(0), r * u(1)}) - 4.0) <= 1e-10);

  Polynomial ellipse = Polynomial::from_string(2, "x1^2 + 4*x2^2");
  Eigen::VectorXd up(2);
  up << 0.0, 1.0;
  CHECK(ray_level_intersection(ellipse, 1.0, up) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("rays meet higher-degree level sets") {
  // x1^2 + x1^6 = 2 crosses at r = 1 along the x1 axis.
  Polynomial sextic = Polynomial::from_string(2, "x1^2 + x1^6");
  Eigen::VectorXd u(2);
  u << 1.0, 0.0;
  double r = ray_level_intersection(sextic, 2.0, u);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rays that never reach the level report no intersection") {
  // Nearly flat in x2: the crossing would sit at 1e4, outside the search box.
  Polynomial flat = Polynomial::from_string(2, "x1^2 + 1e-08*x2^2");
  Eigen::VectorXd up(2);
  up << 0.0, 1.0;
  CHECK_THROWS_AS(ray_level_intersection(flat, 1.0, up), NoIntersection);
}

TEST_CASE("shifting centers sit strictly inside the level set") {
  Polynomial ball = Polynomial::from_string(2, "x1^2 + x2^2");
  Eigen::VectorXd u = direction_2d(0.0);
  Eigen::VectorXd c = shifting_center(ball, 4.0, u, 0.8);
  CHECK(c(0) == doctest::Approx(1.6).epsilon(1e-10));
  CHECK(c(1) == doctest::Approx(0.0));
  CHECK(ball.evaluate({c(0), c(1)}) < 4.0);
}

TEST_CASE("the cuboid table lists eight vertices then six face centers") {
  const std::vector<AnglePair>& a = cuboid_angles();
  REQUIRE(a.size() == 14);
  const std::vector<AnglePair> expected = {
      {-45, -35}, {-45, 35}, {-135, -35}, {-135, 35}, {45, -35}, {45, 35}, {135, -35}, {135, 35},
      {0, 0},     {90, 0},   {180, 0},    {-90, 0},   {0, 90},   {0, -90},
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].psi_deg == expected[i].psi_deg);
    CHECK(a[i].theta_deg == expected[i].theta_deg);
  }
}
