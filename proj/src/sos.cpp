#include "roa/sos.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace roa {

namespace {

void gen_monomials(int nvars, int var, int remaining, std::vector<int>& exps,
                   std::vector<Monomial>& out) {
  if (var == nvars - 1) {
    exps[var] = remaining;
    out.emplace_back(exps);
    exps[var] = 0;
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    exps[var] = e;
    gen_monomials(nvars, var + 1, remaining - e, exps, out);
  }
  exps[var] = 0;
}

}  // namespace

std::vector<Monomial> monomial_basis(int nvars, int min_deg, int max_deg) {
  if (nvars < 1) throw std::invalid_argument("nvars must be >= 1");
  if (min_deg < 0 || max_deg < min_deg) throw std::invalid_argument("bad degree range");
  std::vector<Monomial> out;
  std::vector<int> exps(nvars, 0);
  for (int d = min_deg; d <= max_deg; ++d) gen_monomials(nvars, 0, d, exps, out);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

GramVariable make_gram(int id, int nvars, int min_deg, int max_deg) {
  if (min_deg < 0 || max_deg < min_deg) throw std::invalid_argument("bad degree range");
  const int lo = (min_deg + 1) / 2;
  const int hi = max_deg / 2;
  if (lo > hi)
    throw std::invalid_argument("degree range [" + std::to_string(min_deg) + "," +
                                std::to_string(max_deg) + "] admits no Gram basis");
  return GramVariable{id, monomial_basis(nvars, lo, hi)};
}

void SosExpression::add_constant(const Polynomial& p) {
  if (p.nvars() != nvars_) throw std::invalid_argument("nvars mismatch");
  constant_ += p;
}

void SosExpression::add_gram_term(const Polynomial& multiplier, const GramVariable& g) {
  if (multiplier.nvars() != nvars_ || g.nvars() != nvars_)
    throw std::invalid_argument("nvars mismatch");
  if (g.side() == 0) throw std::invalid_argument("empty Gram basis");
  terms_.push_back(GramTerm{g, false, multiplier, {}, 1.0});
}

void SosExpression::add_gram_lie_term(const DynamicalSystem& sys, const GramVariable& g,
                                      double scale) {
  if (sys.nvars != nvars_ || g.nvars() != nvars_) throw std::invalid_argument("nvars mismatch");
  if (g.side() == 0) throw std::invalid_argument("empty Gram basis");
  terms_.push_back(GramTerm{g, true, Polynomial(nvars_), sys.f, scale});
}

StructuralInfeasibility::StructuralInfeasibility(const Monomial& m, double rhs)
    : std::runtime_error([&] {
        Polynomial p(m.nvars());
        p.add_term(m, 1.0);
        return "no Gram product can supply monomial " + p.to_string() +
               " (required coefficient " + std::to_string(rhs) + ")";
      }()),
      monomial_(m) {}

MatchResult match_coefficients(const SosConstraint& constraint) {
  const SosExpression& expr = constraint.expr;
  if (constraint.target.nvars() != expr.nvars()) throw std::invalid_argument("nvars mismatch");

  MatchResult out;
  std::map<int, int> gram_index;
  std::map<int, const GramVariable*> gram_seen;
  for (const auto& t : expr.terms()) {
    auto [it, inserted] = gram_index.try_emplace(t.var.id, static_cast<int>(out.gram_ids.size()));
    if (inserted) {
      out.gram_ids.push_back(t.var.id);
      gram_seen[t.var.id] = &t.var;
    } else if (!(gram_seen.at(t.var.id)->basis == t.var.basis)) {
      throw std::invalid_argument("Gram id " + std::to_string(t.var.id) +
                                  " used with inconsistent bases");
    }
  }

  struct RowAccum {
    std::map<std::array<int, 3>, double> coeffs;
    double rhs = 0.0;
  };
  std::map<Monomial, RowAccum, GrlexLess> acc;

  for (const auto& t : expr.terms()) {
    const int gi = gram_index.at(t.var.id);
    const int side = t.var.side();
    for (int a = 0; a < side; ++a) {
      for (int b = a; b < side; ++b) {
        Polynomial base(expr.nvars());
        base.add_term(t.var.basis[a] * t.var.basis[b], (a == b ? 1.0 : 2.0) * t.scale);
        Polynomial entry(expr.nvars());
        if (t.lie) {
          for (int k = 0; k < expr.nvars(); ++k) entry += base.derivative(k) * t.field[k];
        } else {
          entry = base * t.multiplier;
        }
        for (const auto& [m, c] : entry.terms()) acc[m].coeffs[{gi, a, b}] += c;
      }
    }
  }
  for (const auto& [m, c] : constraint.target.terms()) acc[m].rhs += c;
  for (const auto& [m, c] : expr.constant().terms()) acc[m].rhs -= c;

  for (const auto& [m, row] : acc) {
    SdpRow r;
    r.rhs = row.rhs;
    for (const auto& [key, c] : row.coeffs)
      if (std::abs(c) >= kCoefficientPruneTol) r.entries.push_back({key[0], key[1], key[2], c});
    if (r.entries.empty()) {
      if (std::abs(r.rhs) > 1e-12) throw StructuralInfeasibility(m, r.rhs);
      continue;
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string row_key(const SdpRow& r) {
  char buf[64];
  std::string key;
  std::snprintf(buf, sizeof buf, "%.17g", r.rhs);
  key += buf;
  for (const SdpEntry& e : r.entries) {
    std::snprintf(buf, sizeof buf, "|%d,%d,%d,%.17g", e.block, e.row, e.col, e.coeff);
    key += buf;
  }
  return key;
}

}  // namespace

SdpProblem assemble(const std::vector<SosConstraint>& constraints,
                    const std::vector<GramVariable>& grams,
                    const std::vector<int>& trace_objective) {
  SdpProblem prob;
  std::map<int, int> block_of;  // gram id -> block index, ascending by id
  for (const GramVariable& g : grams) {
    if (!block_of.try_emplace(g.id, 0).second)
      throw std::invalid_argument("duplicate Gram id " + std::to_string(g.id));
  }
  {
    int idx = 0;
    for (auto& [id, bi] : block_of) bi = idx++;
  }
  prob.blocks.resize(block_of.size());
  for (const GramVariable& g : grams) prob.blocks[block_of.at(g.id)] = SdpBlock{g.id, g.side()};

  std::map<std::string, int> seen;
  for (const SosConstraint& c : constraints) {
    MatchResult mr = match_coefficients(c);
    for (int id : mr.gram_ids)
      if (!block_of.count(id))
        throw std::invalid_argument("constraint references Gram id " + std::to_string(id) +
                                    " missing from gram list");
    for (SdpRow& row : mr.rows) {
      for (SdpEntry& e : row.entries) e.block = block_of.at(mr.gram_ids[e.block]);
      std::sort(row.entries.begin(), row.entries.end(), [](const SdpEntry& a, const SdpEntry& b) {
        return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
      });
      double scale = std::abs(row.rhs);
      for (const SdpEntry& e : row.entries) scale = std::max(scale, std::abs(e.coeff));
      if (scale <= 0) continue;
      if (row.entries.front().coeff < 0) scale = -scale;
      for (SdpEntry& e : row.entries) e.coeff /= scale;
      row.rhs /= scale;
      if (seen.try_emplace(row_key(row), 1).second) prob.rows.push_back(std::move(row));
    }
  }

  for (int id : trace_objective) {
    auto it = block_of.find(id);
    if (it == block_of.end())
      throw std::invalid_argument("objective references unknown Gram id " + std::to_string(id));
    const int side = prob.blocks[it->second].side;
    for (int a = 0; a < side; ++a) prob.objective.push_back({it->second, a, a, 1.0});
  }
  return prob;
}

Polynomial extract(const GramVariable& g, const SdpProblem& problem, const SdpSolution& sol) {
  const int bi = problem.block_index(g.id);
  if (bi < 0) throw std::invalid_argument("Gram id not present in problem");
  if (sol.status != SdpStatus::feasible || bi >= static_cast<int>(sol.block_values.size()))
    throw std::invalid_argument("extract requires a feasible solution");
  const Eigen::MatrixXd& Q = sol.block_values[bi];
  if (Q.rows() != g.side()) throw std::invalid_argument("Gram side mismatch");
  Polynomial p(g.nvars());
  for (int a = 0; a < g.side(); ++a)
    for (int b = a; b < g.side(); ++b)
      p.add_term(g.basis[a] * g.basis[b], (a == b ? 1.0 : 2.0) * Q(a, b));
  return p;
}

SosCheck check_sos(const Polynomial& p, const SdpOptions& opts) {
  SosCheck out;
  if (p.is_zero()) {
    out.is_sos = true;
    out.status = SdpStatus::feasible;
    out.residual = 0.0;
    return out;
  }
  const int lo = (p.min_degree() + 1) / 2;
  const int hi = p.degree() / 2;
  if (lo > hi) return out;  // no basis can reach the leading terms
  GramVariable g{0, monomial_basis(p.nvars(), lo, hi)};
  SosExpression expr(p.nvars());
  expr.add_gram_term(Polynomial::constant(p.nvars(), 1.0), g);
  SdpProblem prob;
  try {
    prob = assemble({{std::move(expr), p}}, {g});
  } catch (const StructuralInfeasibility&) {
    out.status = SdpStatus::infeasible;
    return out;
  }
  SdpSolution sol = solve_sdp(prob, opts);
  out.status = sol.status;
  out.is_sos = sol.status == SdpStatus::feasible;
  if (out.is_sos) out.residual = sol.eq_residual;
  return out;
}

SosDistance sos_distance(const Polynomial& p, const SdpOptions& opts) {
  SosDistance out;
  if (p.is_zero()) {
    out.status = SdpStatus::feasible;
    out.t = 0.0;
    return out;
  }
  const int n = p.nvars();
  const int lo = (p.min_degree() + 1) / 2;
  const int hi = p.degree() / 2;
  if (lo > hi) {
    out.status = SdpStatus::infeasible;
    out.t = std::numeric_limits<double>::infinity();
    return out;
  }

  // Weight sum_k |x|^(2k): its expansion puts a positive coefficient on the
  // square of every basis monomial, so p + t * weight is strictly Gram
  // feasible for large t and the minimization is always well posed.
  Polynomial norm2(n);
  for (int v = 0; v < n; ++v) {
    std::vector<int> e(n, 0);
    e[v] = 2;
    norm2.add_term(Monomial(std::move(e)), 1.0);
  }
  Polynomial weight = Polynomial::constant(n, 1.0);
  for (int k = 0; k < lo; ++k) weight = weight * norm2;
  Polynomial power = weight;
  for (int k = lo + 1; k <= hi; ++k) {
    power = power * norm2;
    weight += power;
  }

  // Interior-point runs on the min-t objective stall near the cone boundary,
  // so t is searched by bisection over pure feasibility solves instead; those
  // terminate early and certify every accepted level.
  const GramVariable g{0, monomial_basis(n, lo, hi)};
  auto feasible_at = [&](double t) {
    SosExpression expr(n);
    expr.add_gram_term(Polynomial::constant(n, 1.0), g);
    SdpProblem prob;
    try {
      prob = assemble({{std::move(expr), p + weight * t}}, {g});
    } catch (const StructuralInfeasibility&) {
      return false;
    }
    return solve_sdp(prob, opts).status == SdpStatus::feasible;
  };

  if (feasible_at(0.0)) {
    out.status = SdpStatus::feasible;
    out.t = 0.0;
    return out;
  }
  double scale = 1.0;
  for (const auto& [m, c] : p.terms()) scale = std::max(scale, std::abs(c));
  double lo_t = 0.0;
  double hi_t = 1e-10 * scale;
  while (!feasible_at(hi_t)) {
    lo_t = hi_t;
    hi_t *= 10.0;
    if (hi_t > 1e12 * scale) {
      out.status = SdpStatus::marginal;
      out.t = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  for (int step = 0; step < 12; ++step) {
    const double mid = 0.5 * (lo_t + hi_t);
    if (feasible_at(mid))
      hi_t = mid;
    else
      lo_t = mid;
  }
  out.status = SdpStatus::feasible;
  out.t = hi_t;
  return out;
}

}  // namespace roa
