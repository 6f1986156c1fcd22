#pragma once

// Translation from sum-of-squares constraints to semidefinite programs.  An
// unknown SOS polynomial is represented by a Gram matrix over a monomial
// basis; matching coefficients of an affine Gram expression against a target
// polynomial yields the linear equalities of the SDP.

#include <stdexcept>
#include <vector>

#include "roa/poly.hpp"
#include "roa/sdp.hpp"

namespace roa {

// Monomials of total degree in [min_deg, max_deg], ascending graded-lex.
std::vector<Monomial> monomial_basis(int nvars, int min_deg, int max_deg);

// Unknown polynomial s(x) = Z(x)' Q Z(x) with Q constrained PSD.
struct GramVariable {
  int id = 0;
  std::vector<Monomial> basis;

  int nvars() const { return basis.empty() ? 0 : basis.front().nvars(); }
  int side() const { return static_cast<int>(basis.size()); }
};

// Gram variable able to represent any SOS polynomial whose terms have total
// degree within [min_deg, max_deg].
GramVariable make_gram(int id, int nvars, int min_deg, int max_deg);

// Affine expression in Gram unknowns plus a known polynomial part.
class SosExpression {
 public:
  explicit SosExpression(int nvars) : nvars_(nvars), constant_(nvars) {}

  int nvars() const { return nvars_; }
  void add_constant(const Polynomial& p);
  // multiplier(x) * (Z' Q Z)(x)
  void add_gram_term(const Polynomial& multiplier, const GramVariable& g);
  // scale * d(Z' Q Z)/dt along xdot = f(x)
  void add_gram_lie_term(const DynamicalSystem& sys, const GramVariable& g, double scale = 1.0);

  struct GramTerm {
    GramVariable var;
    bool lie = false;
    Polynomial multiplier;            // unused for lie terms
    std::vector<Polynomial> field;    // f, for lie terms
    double scale = 1.0;
  };
  const Polynomial& constant() const { return constant_; }
  const std::vector<GramTerm>& terms() const { return terms_; }

 private:
  int nvars_;
  Polynomial constant_;
  std::vector<GramTerm> terms_;
};

// expr == target, where the expression's Gram variables are the unknowns.
struct SosConstraint {
  SosExpression expr;
  Polynomial target;
};

// A target monomial that no unknown and no constant term can produce.
class StructuralInfeasibility : public std::runtime_error {
 public:
  StructuralInfeasibility(const Monomial& m, double rhs);
  const Monomial& monomial() const { return monomial_; }

 private:
  Monomial monomial_;
};

// Equalities over Gram entries for a single constraint; entries' block field
// indexes gram_ids.  Rows are ordered by ascending graded-lex monomial.
struct MatchResult {
  std::vector<int> gram_ids;
  std::vector<SdpRow> rows;
};
MatchResult match_coefficients(const SosConstraint& constraint);

// Builds the joint SDP for several constraints sharing Gram variables.  Rows
// are deduplicated and scaled to unit max magnitude.  trace_objective lists
// Gram ids whose traces are summed into a minimization objective.
SdpProblem assemble(const std::vector<SosConstraint>& constraints,
                    const std::vector<GramVariable>& grams,
                    const std::vector<int>& trace_objective = {});

// Reads a Gram block out of a solution and expands it to a polynomial.
Polynomial extract(const GramVariable& g, const SdpProblem& problem, const SdpSolution& sol);

struct SosCheck {
  bool is_sos = false;
  SdpStatus status = SdpStatus::marginal;
  double residual = -1.0;  // solver equality residual when feasible
};

// Decides SOS membership of a known polynomial.  Structural impossibilities
// (odd leading degree and the like) report as not SOS.
SosCheck check_sos(const Polynomial& p, const SdpOptions& opts = {});

struct SosDistance {
  SdpStatus status = SdpStatus::marginal;
  double t = -1.0;
};

// Certified upper bound on the smallest t >= 0 such that p + t * sum_k
// |x|^(2k) is SOS, with k running over the basis degrees check_sos would
// use.  Found by bracketing and bisecting t over feasibility solves, so every
// reported value carries a Gram certificate.  Zero iff p itself certifies;
// a small positive t measures how far numerical noise pushed p outside the
// cone, which makes this the robust form of an SOS membership replay.  t is
// +infinity when no basis can reach p's leading terms.
SosDistance sos_distance(const Polynomial& p, const SdpOptions& opts = {});

}  // namespace roa
