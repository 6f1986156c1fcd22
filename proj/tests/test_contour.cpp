#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "roa/contour.hpp"

using namespace roa;

namespace {

constexpr double kPi = 3.14159265358979323846;

Box square(double half) { return Box{{-half, -half}, {half, half}}; }

double arc_length(const Polyline& line) {
  double len = 0.0;
  for (std::size_t k = 1; k < line.points.size(); ++k)
    len += std::hypot(line.points[k][0] - line.points[k - 1][0],
                      line.points[k][1] - line.points[k - 1][1]);
  return len;
}

}  // namespace

TEST_CASE("the unit circle contours to one closed loop") {
  Polynomial V = Polynomial::from_string(2, "x1^2 + x2^2");
  std::vector<Polyline> lines = marching_squares(V, 1.0, square(2.0), 401);
  REQUIRE(lines.size() == 1);
  const Polyline& loop = lines[0];
  CHECK(loop.closed);
  REQUIRE(loop.points.size() > 100);
  CHECK(loop.points.front() == loop.points.back());
  for (const auto& p : loop.points)
    CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) <= 1e-3);
  CHECK(arc_length(loop) == doctest::Approx(2.0 * kPi).epsilon(0.01));
}

TEST_CASE("contour points sit on the level set of an ellipse") {
  Polynomial V = Polynomial::from_string(2, "x1^2 + 4*x2^2");
  std::vector<Polyline> lines = marching_squares(V, 1.0, square(2.0), 401);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  for (const auto& p : lines[0].points)
    CHECK(std::abs(V.evaluate({p[0], p[1]}) - 1.0) <= 1e-3);
}

TEST_CASE("level sets leaving the box become open polylines") {
  // {x1 = 0.5} crosses the box vertically; linear interpolation is exact.
  Polynomial V = Polynomial::from_string(2, "x1");
  std::vector<Polyline> lines = marching_squares(V, 0.5, square(2.0), 101);
  REQUIRE(lines.size() == 1);
  CHECK_FALSE(lines[0].closed);
  for (const auto& p : lines[0].points) CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  // The chain spans the full box height.
  double lo = 1e9, hi = -1e9;
  for (const auto& p : lines[0].points) {
    lo = std::min(lo, p[1]);
    hi = std::max(hi, p[1]);
  }
  CHECK(hi - lo >= 3.9);
}

TEST_CASE("hyperbola branches stay separate") {
  Polynomial V = Polynomial::from_string(2, "x1^2 - x2^2");
  std::vector<Polyline> lines = marching_squares(V, 0.5, square(2.0), 201);
  CHECK(lines.size() == 2);
  for (const Polyline& line : lines) {
    CHECK_FALSE(line.closed);
    double sign = line.points[0][0] > 0 ? 1.0 : -1.0;
    for (const auto& p : line.points) {
      CHECK(std::abs(V.evaluate({p[0], p[1]}) - 0.5) <= 1e-3);
      CHECK(sign * p[0] > 0.0);
    }
  }
}

TEST_CASE("contours are a pure function of the inputs") {
  Polynomial V = Polynomial::from_string(2, "x1^2 + x2^2 + 0.3*x1*x2");
  std::vector<Polyline> a = marching_squares(V, 0.8, square(2.0), 151);
  std::vector<Polyline> b = marching_squares(V, 0.8, square(2.0), 151);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].closed == b[k].closed);
    CHECK(a[k].points == b[k].points);
  }
}

TEST_CASE("straddling cells hug the sphere") {
  Polynomial V = Polynomial::from_string(3, "x1^2 + x2^2 + x3^2");
  Box box{{-2, -2, -2}, {2, 2, 2}};
  const int res = 61;
  std::vector<std::array<double, 3>> cells = straddling_cells(V, 1.0, box, res);
  CHECK(cells.size() > 500);
  // A straddling cell's center is within half a cell diagonal of the surface,
  // so |V - 1| <= |grad V| * d with |grad V| <= 2(|c| + d).
  const double h = 4.0 / (res - 1);
  const double d = 0.5 * h * std::sqrt(3.0);
  for (const auto& c : cells) {
    const double r = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    CHECK(std::abs(V.evaluate({c[0], c[1], c[2]}) - 1.0) <= 2.0 * (r + d) * d + 1e-12);
  }
  CHECK(straddling_cells(V, 1.0, box, res) == cells);
}

TEST_CASE("polyline and point csv exports") {
  Polynomial V = Polynomial::from_string(2, "x1^2 + x2^2");
  std::vector<Polyline> lines = marching_squares(V, 1.0, square(2.0), 41);
  const std::string path = "/tmp/roa_test_polylines.csv";
  write_polylines_csv(path, lines);
  {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "polyline,x1,x2");
    std::size_t rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) {
        CHECK(line.rfind("0,", 0) == 0);
        ++rows;
      }
    std::size_t expect = 0;
    for (const Polyline& l : lines) expect += l.points.size();
    CHECK(rows == expect);
  }
  std::remove(path.c_str());

  const std::string path3 = "/tmp/roa_test_points.csv";
  write_points_csv(path3, {{0.5, -1.0, 2.0}, {0.0, 0.0, 1.0}});
  {
    std::ifstream in(path3);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "x1,x2,x3");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0.5,-1,2");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0,0,1");
  }
  std::remove(path3.c_str());
}
