#include <doctest.h>

#include <cmath>

#include "roa/sos.hpp"

using namespace roa;

namespace {

Polynomial P(const std::string& text) { return Polynomial::from_string(2, text); }

bool coeffs_close(const Polynomial& a, const Polynomial& b, double tol) {
  Polynomial d = a - b;
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("monomial bases enumerate the right counts in order") {
  // Degrees 0..2 in two variables: 1, x2, x1, x2^2, x1*x2, x1^2.
  std::vector<Monomial> b = monomial_basis(2, 0, 2);
  REQUIRE(b.size() == 6);
  CHECK(b[0].degree() == 0);
  CHECK(b[5] == Monomial({2, 0}));
  // Degrees 1..3: 2 + 3 + 4 entries.
  CHECK(monomial_basis(2, 1, 3).size() == 9);
  // Three variables, degrees 0..2: 1 + 3 + 6.
  CHECK(monomial_basis(3, 0, 2).size() == 10);

  GramVariable g = make_gram(4, 2, 2, 4);
  CHECK(g.id == 4);
  // Products of degree-1..2 basis monomials span total degrees 2..4.
  CHECK(g.side() == 5);
}

TEST_CASE("coefficient matching pins the mirror convention") {
  // 1 * (Z' Q Z) == x1^2 + x2^2 over basis {x2, x1}: rows for x2^2, x1*x2,
  // x1^2 with the off-diagonal row carrying the mirrored factor 2.
  GramVariable g = make_gram(0, 2, 2, 2);
  REQUIRE(g.side() == 2);
  SosExpression expr(2);
  expr.add_gram_term(Polynomial::constant(2, 1.0), g);
  MatchResult m = match_coefficients({std::move(expr), P("x1^2 + x2^2")});
  REQUIRE(m.rows.size() == 3);
  REQUIRE(m.gram_ids == std::vector<int>{0});
  for (const SdpRow& r : m.rows) REQUIRE(r.entries.size() == 1);
  CHECK(m.rows[0].entries[0].coeff == 1.0);  // x2^2 -> Q(0,0)
  CHECK(m.rows[0].rhs == 1.0);
  CHECK(m.rows[1].entries[0].coeff == 2.0);  // x1*x2 -> mirrored Q(0,1)
  CHECK(m.rows[1].rhs == 0.0);
  CHECK(m.rows[2].entries[0].coeff == 1.0);  // x1^2 -> Q(1,1)
  CHECK(m.rows[2].rhs == 1.0);
}

TEST_CASE("unreachable target monomials are structurally infeasible") {
  GramVariable g = make_gram(0, 2, 2, 2);
  SosExpression expr(2);
  expr.add_gram_term(Polynomial::constant(2, 1.0), g);
  CHECK_THROWS_AS(match_coefficients({std::move(expr), P("x1^4")}), StructuralInfeasibility);
}

TEST_CASE("strictly positive polynomials certify as SOS") {
  CHECK(check_sos(P("x1^2 + x2^2")).is_sos);
  CHECK(check_sos(P("2*x1^2 + 3*x2^2 + x1*x2")).is_sos);
  CHECK(check_sos(P("x1^4 + 2*x1^2*x2^2 + x2^4 + 0.1*x1^2 + 0.1*x2^2")).is_sos);
  SosCheck c = check_sos(P("x1^2 + x2^2"));
  CHECK(c.residual >= 0.0);
  CHECK(c.residual <= 1e-7);
}

TEST_CASE("indefinite and odd-leading polynomials are rejected") {
  CHECK_FALSE(check_sos(P("x1^2 - x2^2")).is_sos);
  CHECK_FALSE(check_sos(P("x1^3 + x2^2")).is_sos);
  CHECK_FALSE(check_sos(P("-x1^2")).is_sos);
}

TEST_CASE("the Motzkin polynomial is nonnegative but not SOS") {
  Polynomial motzkin = P("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1");
  // Nonnegativity sanity at a few points, including the minimizer (1, 1).
  CHECK(motzkin.evaluate({1.0, 1.0}) == doctest::Approx(0.0));
  CHECK(motzkin.evaluate({0.5, -1.2}) > 0.0);
  CHECK_FALSE(check_sos(motzkin).is_sos);
  // Its distance to the cone is strictly positive.
  SosDistance d = sos_distance(motzkin);
  REQUIRE(d.status == SdpStatus::feasible);
  CHECK(d.t > 1e-5);
}

TEST_CASE("cone distance of an SOS polynomial is zero") {
  SosDistance d = sos_distance(P("x1^4 + 2*x1^2*x2^2 + x2^4 + x1^2"));
  REQUIRE(d.status == SdpStatus::feasible);
  CHECK(d.t >= -1e-9);
  CHECK(d.t <= 1e-7);
}

TEST_CASE("extraction reproduces the certified polynomial") {
  Polynomial target = P("x1^4 + 2*x1^2*x2^2 + x2^4 + x1^2 + x2^2");
  GramVariable g = make_gram(0, 2, 2, 4);
  SosExpression expr(2);
  expr.add_gram_term(Polynomial::constant(2, 1.0), g);
  SdpProblem prob = assemble({{std::move(expr), target}}, {g});
  SdpSolution sol = solve_sdp(prob);
  REQUIRE(sol.status == SdpStatus::feasible);
  CHECK(coeffs_close(extract(g, prob, sol), target, 1e-6));
}

TEST_CASE("polynomial multipliers scale the gram expression") {
  // x1^2 * (Z' Q Z) == x1^4 + x1^2*x2^2 forces Z' Q Z == x1^2 + x2^2.
  GramVariable g = make_gram(0, 2, 2, 2);
  SosExpression expr(2);
  expr.add_gram_term(P("x1^2"), g);
  SdpProblem prob = assemble({{std::move(expr), P("x1^4 + x1^2*x2^2")}}, {g});
  SdpSolution sol = solve_sdp(prob);
  REQUIRE(sol.status == SdpStatus::feasible);
  CHECK(coeffs_close(extract(g, prob, sol), P("x1^2 + x2^2"), 1e-6));
}

TEST_CASE("lie terms differentiate the gram polynomial along the field") {
  // Along xdot = -x, d(Z' Q Z)/dt = -2 Z' Q Z for the degree-1 basis, so
  // scale -1 matches 2*(x1^2 + x2^2) with Z' Q Z = x1^2 + x2^2.
  DynamicalSystem sys;
  sys.name = "decay";
  sys.nvars = 2;
  sys.f = {P("-x1"), P("-x2")};
  GramVariable g = make_gram(0, 2, 2, 2);
  SosExpression expr(2);
  expr.add_gram_lie_term(sys, g, -1.0);
  SdpProblem prob = assemble({{std::move(expr), P("2*x1^2 + 2*x2^2")}}, {g});
  SdpSolution sol = solve_sdp(prob);
  REQUIRE(sol.status == SdpStatus::feasible);
  CHECK(coeffs_close(extract(g, prob, sol), P("x1^2 + x2^2"), 1e-6));
}
