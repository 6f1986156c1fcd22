#include "roa/vsiter.hpp"

#include <cmath>
#include <limits>

#include "roa/lyap.hpp"
#include "roa/sos.hpp"

namespace roa {

namespace {

constexpr double kGammaStart = 1.0;
constexpr double kLevelCap = double(1 << 30);
constexpr double kGammaFloor = 1e-9;

Polynomial norm_squared(int nvars) {
  Polynomial p(nvars);
  for (int i = 0; i < nvars; ++i) {
    std::vector<int> e(nvars, 0);
    e[i] = 2;
    p.add_term(Monomial(std::move(e)), 1.0);
  }
  return p;
}

int max_field_degree(const DynamicalSystem& sys) {
  int d = 0;
  for (const Polynomial& fi : sys.f) d = std::max(d, fi.degree());
  return d;
}

// Even span reachable by a Gram over the given degree range.
int gram_min_product(int min_deg) { return 2 * ((min_deg + 1) / 2); }
int gram_max_product(int max_deg) { return 2 * (max_deg / 2); }

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

IterationConfig IterationConfig::defaults(int nvars) {
  IterationConfig cfg(nvars);
  cfg.l1 = norm_squared(nvars) * 1e-6;
  cfg.l2 = cfg.l1;
  // The margins l1, l2 are ~1e-6 |x|^2 while the certified identities carry
  // degree-10 monomials; at |x| ~ 3 a coefficient residual of 1e-7 turns into
  // pointwise slack far above the margin, and sampled trajectories near the
  // region boundary expose it.  Certificate soundness needs the solver run
  // well below the margins.
  cfg.sdp.eq_tol = 1e-9;
  cfg.sdp.psd_tol = 1e-9;
  cfg.sdp.gap_tol = 1e-9;
  cfg.sdp.early_exit_factor = 0.1;
  return cfg;
}

void IterationConfig::validate(const DynamicalSystem& sys,
                               const std::vector<RoundConfig>& rounds) const {
  sys.validate();
  if (deg_V < 2 || deg_V % 2 != 0) throw std::invalid_argument("deg_V must be even and >= 2");
  if (deg_s0_min < 0 || deg_s0_max < deg_s0_min)
    throw std::invalid_argument("bad s0 degree range");
  if (deg_si_min < 0 || deg_si_max < deg_si_min)
    throw std::invalid_argument("bad shape multiplier degree range");
  if (l1.nvars() != sys.nvars || l2.nvars() != sys.nvars)
    throw std::invalid_argument("margin polynomial dimension mismatch");
  if (l1.is_zero() || l2.is_zero()) throw std::invalid_argument("margins must be nonzero");
  if (deg_V < l1.degree())
    throw std::invalid_argument("deg_V must reach the positivity margin degree");

  const int lie_deg = deg_V - 1 + max_field_degree(sys);
  if (deg_V + gram_max_product(deg_s0_max) < std::max(lie_deg, l2.degree()))
    throw std::invalid_argument(
        "deg_V + deg(s0) must cover the decrease constraint degree; raise deg_s0_max");
  for (const RoundConfig& rc : rounds)
    if (!rc.shapes.empty() && 2 + gram_max_product(deg_si_max) < deg_V)
      throw std::invalid_argument(
          "deg(p) + deg(s_i) must reach deg_V; raise deg_si_max or lower deg_V");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  for (const RoundConfig& rc : rounds)
    for (const ShapeSpec& ss : rc.shapes) {
      if (ss.N.rows() != sys.nvars || ss.N.cols() != sys.nvars)
        throw std::invalid_argument("shape matrix dimension mismatch");
      ShapeFunction{ss.N, Eigen::VectorXd::Zero(sys.nvars)}.validate();
      if (ss.center_mode == ShapeSpec::Center::ray && !(ss.sigma > 0 && ss.sigma < 1))
        throw std::invalid_argument("shape sigma must lie in (0, 1)");
      if (ss.center_mode == ShapeSpec::Center::ray && sys.nvars != 2 && sys.nvars != 3)
        throw std::invalid_argument("ray-placed centers need a 2-D or 3-D state");
    }
}

namespace {

struct Trial {
  bool feasible = false;
  int sdp_iters = 0;
};

// Decrease-certificate feasibility at a fixed level: the constraint
// -(dV/dt + l2) + (V - gamma) s0 must admit an SOS witness.
Trial decrease_trial(const DynamicalSystem& sys, const Polynomial& V, const Polynomial& lieV,
                     double gamma, const IterationConfig& cfg, Polynomial* s0_out) {
  const int n = sys.nvars;
  Polynomial known = -lieV - cfg.l2;
  const int s0_lo = gram_min_product(cfg.deg_s0_min);
  const int s0_hi = gram_max_product(cfg.deg_s0_max);
  int dmin = std::min({known.is_zero() ? 0 : known.min_degree(), s0_lo});
  int dmax = std::max(known.degree(), V.degree() + s0_hi);

  GramVariable s0 = make_gram(0, n, cfg.deg_s0_min, cfg.deg_s0_max);
  GramVariable cert = make_gram(1, n, dmin, dmax);
  SosExpression expr(n);
  expr.add_constant(known);
  expr.add_gram_term(V - Polynomial::constant(n, gamma), s0);
  expr.add_gram_term(Polynomial::constant(n, -1.0), cert);

  SdpProblem prob = assemble({{std::move(expr), Polynomial::zero(n)}}, {s0, cert});
  SdpSolution sol = solve_sdp(prob, cfg.sdp);
  Trial t;
  t.feasible = sol.status == SdpStatus::feasible;
  t.sdp_iters = sol.iterations;
  if (t.feasible && s0_out) *s0_out = extract(s0, prob, sol);
  return t;
}

// Containment-certificate feasibility: -(V - gamma) + (p - beta) s admits an
// SOS witness, forcing {p <= beta} into {V <= gamma}.
Trial containment_trial(const DynamicalSystem& sys, const Polynomial& V, double gamma,
                        const Polynomial& p, double beta, const IterationConfig& cfg,
                        Polynomial* s_out) {
  const int n = sys.nvars;
  Polynomial known = Polynomial::constant(n, gamma) - V;
  const int si_lo = gram_min_product(cfg.deg_si_min);
  const int si_hi = gram_max_product(cfg.deg_si_max);
  int dmin = std::min({known.is_zero() ? 0 : known.min_degree(), si_lo});
  int dmax = std::max(known.degree(), p.degree() + si_hi);

  GramVariable s = make_gram(0, n, cfg.deg_si_min, cfg.deg_si_max);
  GramVariable cert = make_gram(1, n, dmin, dmax);
  SosExpression expr(n);
  expr.add_constant(known);
  expr.add_gram_term(p - Polynomial::constant(n, beta), s);
  expr.add_gram_term(Polynomial::constant(n, -1.0), cert);

  SdpProblem prob = assemble({{std::move(expr), Polynomial::zero(n)}}, {s, cert});
  SdpSolution sol = solve_sdp(prob, cfg.sdp);
  Trial t;
  t.feasible = sol.status == SdpStatus::feasible;
  t.sdp_iters = sol.iterations;
  if (t.feasible && s_out) *s_out = extract(s, prob, sol);
  return t;
}

}  // namespace

GammaStepResult gamma_step(const DynamicalSystem& sys, const Polynomial& V,
                           const IterationConfig& cfg) {
  GammaStepResult res(sys.nvars);
  const Polynomial lieV = lie_derivative(V, sys);

  Polynomial witness(sys.nvars);
  auto trial = [&](double g, bool keep) {
    Trial t = decrease_trial(sys, V, lieV, g, cfg, keep ? &witness : nullptr);
    res.sdp_iters += t.sdp_iters;
    return t.feasible;
  };

  double lo, hi;
  if (trial(kGammaStart, true)) {
    lo = kGammaStart;
    hi = 2.0 * kGammaStart;
    while (trial(hi, true)) {
      lo = hi;
      hi *= 2.0;
      if (lo >= kLevelCap) {
        res.gamma = lo;
        res.s0 = witness;
        res.unbounded = true;
        return res;
      }
    }
  } else {
    hi = kGammaStart;
    lo = 0.5 * kGammaStart;
    while (!trial(lo, true)) {
      hi = lo;
      lo *= 0.5;
      if (lo < kGammaFloor) throw InfeasibleAtZero();
    }
  }

  while (hi - lo > cfg.gamma_rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (trial(mid, true))
      lo = mid;
    else
      hi = mid;
  }
  res.gamma = lo;
  res.s0 = witness;
  return res;
}

BetaStepResult beta_step(const DynamicalSystem& sys, const Polynomial& V, double gamma,
                         const Polynomial& p, const IterationConfig& cfg, double seed_beta,
                         int shape_index) {
  BetaStepResult res(sys.nvars);
  Polynomial witness(sys.nvars);
  auto trial = [&](double b, bool keep) {
    Trial t = containment_trial(sys, V, gamma, p, b, cfg, keep ? &witness : nullptr);
    res.sdp_iters += t.sdp_iters;
    return t.feasible;
  };

  double lo = std::max(seed_beta, 0.0);
  if (!trial(lo, true)) {
    // The warm start is guaranteed feasible in exact arithmetic; fall back to
    // zero before giving up on the shape.
    if (lo > 0.0 && trial(0.0, true)) {
      lo = 0.0;
    } else {
      // The shape's center is the unique stationary point of the quadratic p.
      const int n = sys.nvars;
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      for (int k = 0; k < n; ++k) {
        const Polynomial gk = p.derivative(k);
        for (const auto& [mono, coeff] : gk.terms()) {
          if (mono.degree() == 0) {
            b(k) = coeff;
          } else if (mono.degree() == 1) {
            for (int j = 0; j < n; ++j)
              if (mono.exponent(j) == 1) A(k, j) = coeff;
          }
        }
      }
      Eigen::VectorXd center = A.fullPivLu().solve(-b);
      throw ShapeInfeasible(shape_index, V.evaluate(to_std(center)), gamma);
    }
  }
  // Doubling bracket anchored at the warm start keeps the bisection quantum
  // a fixed fraction of the relative tolerance (lo/1024 for tol 1e-3), so
  // the stall detector sees sub-tolerance growth as sub-tolerance instead of
  // through a grid whose spacing depends on an arbitrary cap.
  double hi = lo > 0.0 ? 2.0 * lo : 1.0;
  while (trial(hi, true)) {
    lo = hi;
    hi *= 2.0;
    if (lo >= kLevelCap)
      throw std::runtime_error("shape level grows without bound; sublevel set is not compact");
  }

  while (hi - lo > cfg.beta_rel_tol * std::max(lo, 1e-3)) {
    const double mid = 0.5 * (lo + hi);
    if (trial(mid, true))
      lo = mid;
    else
      hi = mid;
  }
  res.beta = lo;
  res.s = witness;
  return res;
}

VStepResult v_step(const DynamicalSystem& sys, double gamma, const Polynomial& s0,
                   const std::vector<CertifiedShape>& shapes, const IterationConfig& cfg) {
  const int n = sys.nvars;
  VStepResult out;

  GramVariable qv = make_gram(0, n, 2, cfg.deg_V);
  std::vector<GramVariable> grams{qv};
  std::vector<SosConstraint> constraints;

  // Decrease constraint with V = l1 + Z' Qv Z unknown.
  {
    Polynomial known = -lie_derivative(cfg.l1, sys) - cfg.l2 +
                       (cfg.l1 - Polynomial::constant(n, gamma)) * s0;
    const int lie_deg = cfg.deg_V - 1 + max_field_degree(sys);
    int dmin = std::min({known.is_zero() ? 2 : known.min_degree(), 2});
    int dmax = std::max({known.degree(), lie_deg, cfg.deg_V + s0.degree()});
    GramVariable cert = make_gram(1, n, dmin, dmax);
    grams.push_back(cert);

    SosExpression expr(n);
    expr.add_constant(known);
    expr.add_gram_lie_term(sys, qv, -1.0);
    expr.add_gram_term(s0, qv);
    expr.add_gram_term(Polynomial::constant(n, -1.0), cert);
    constraints.push_back({std::move(expr), Polynomial::zero(n)});
  }

  // Containment constraints with the shape data fixed.
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const Polynomial p = shapes[i].shape.to_polynomial();
    Polynomial known = Polynomial::constant(n, gamma) - cfg.l1 +
                       (p - Polynomial::constant(n, shapes[i].beta)) * shapes[i].s;
    int dmin = std::min(known.is_zero() ? 0 : known.min_degree(), 2);
    int dmax = std::max(known.degree(), cfg.deg_V);
    GramVariable cert = make_gram(2 + static_cast<int>(i), n, dmin, dmax);
    grams.push_back(cert);

    SosExpression expr(n);
    expr.add_constant(known);
    expr.add_gram_term(Polynomial::constant(n, -1.0), qv);
    expr.add_gram_term(Polynomial::constant(n, -1.0), cert);
    constraints.push_back({std::move(expr), Polynomial::zero(n)});
  }

  // Selection: run the feasibility solve past its early exit so the iterate
  // approaches the central path's limit point.  That makes the returned V a
  // pure function of the constraint data rather than of the starting point,
  // which is what lets the alternation settle: an early-exit point drifts
  // from iteration to iteration and keeps the measured beta increments
  // hovering at the stall tolerance forever.  Objective-based selections
  // (trace in either direction, or integral weights) land on extremal
  // points of the feasible set and leave the next beta step no room to
  // grow, fixpointing the alternation far below the reachable region.
  SdpProblem prob = assemble(constraints, grams);
  SdpOptions vopts = cfg.sdp;
  vopts.early_exit_factor = 1e-9;
  SdpSolution sol = solve_sdp(prob, vopts);
  out.sdp_iters = sol.iterations;
  if (sol.status == SdpStatus::feasible) out.V = cfg.l1 + extract(qv, prob, sol);
  return out;
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::v_step_infeasible:
      return "v_step_infeasible";
    case StopReason::beta_stalled:
      return "beta_stalled";
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::gamma_only:
      return "gamma_only";
    case StopReason::global_stability:
      return "global_stability";
  }
  return "unknown";
}

namespace {

Eigen::VectorXd spec_direction(const ShapeSpec& ss, int nvars) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  if (nvars == 2) return direction_2d(ss.theta_deg * kDegToRad);
  return direction_3d(ss.theta_deg * kDegToRad, ss.psi_deg * kDegToRad);
}

}  // namespace

RoundResult run_round(const DynamicalSystem& sys, const Polynomial& V_init,
                      const RoundConfig& round_cfg, const IterationConfig& cfg, int round_index) {
  const int n = sys.nvars;
  {
    SosCheck positivity = check_sos(V_init - cfg.l1, cfg.sdp);
    if (!positivity.is_sos)
      throw std::runtime_error("initial candidate is not certified positive definite");
  }

  Polynomial V = V_init;
  GammaStepResult entry = gamma_step(sys, V, cfg);

  auto make_certificate = [&](const Polynomial& Vc, double gamma, const Polynomial& s0,
                              std::vector<CertifiedShape> certified, int iters,
                              bool global) {
    Certificate cert(n);
    cert.system_name = sys.name;
    cert.V = Vc;
    cert.gamma = gamma;
    cert.s0 = s0;
    cert.shapes = std::move(certified);
    cert.round_index = round_index;
    cert.iterations = iters;
    cert.global_stability = global;
    return cert;
  };

  // At an unbounded level the decrease identity normally holds with no level
  // restriction at all; a zero multiplier keeps the stored identity at sane
  // coefficient scale instead of carrying the 2^30 level into the replay.
  auto global_s0 = [&](const GammaStepResult& g) {
    SosCheck direct = check_sos(-lie_derivative(V, sys) - cfg.l2, cfg.sdp);
    return direct.is_sos ? Polynomial::zero(n) : g.s0;
  };

  if (entry.unbounded) {
    RoundResult rr(make_certificate(V, entry.gamma, global_s0(entry), {}, 0, true),
                   StopReason::global_stability);
    rr.trace.push_back(TraceRow{round_index, 1, entry.gamma, {}, entry.sdp_iters, 0, 0});
    return rr;
  }

  // Shape centers live on the entry level set; origin-centered shapes skip
  // the ray intersection.
  std::vector<ShapeFunction> shape_fns;
  for (std::size_t i = 0; i < round_cfg.shapes.size(); ++i) {
    const ShapeSpec& ss = round_cfg.shapes[i];
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    if (ss.center_mode == ShapeSpec::Center::ray) {
      center = shifting_center(V, entry.gamma, spec_direction(ss, n), ss.sigma);
      if (V.evaluate(to_std(center)) >= entry.gamma)
        throw std::runtime_error("shifted center escaped the level set");
    }
    shape_fns.push_back(ShapeFunction{ss.N, center});
  }
  std::vector<Polynomial> shape_polys;
  for (const ShapeFunction& sf : shape_fns) shape_polys.push_back(sf.to_polynomial());

  if (round_cfg.gamma_only) {
    RoundResult rr(make_certificate(V, entry.gamma, entry.s0, {}, 0, false),
                   StopReason::gamma_only);
    rr.trace.push_back(TraceRow{round_index, 1, entry.gamma, {}, entry.sdp_iters, 0, 0});
    return rr;
  }

  const std::size_t nshapes = shape_fns.size();
  std::vector<double> prev_betas(nshapes, 0.0);
  double prev_gamma = std::numeric_limits<double>::quiet_NaN();
  int stall_streak = 0;
  std::optional<Certificate> last_good;
  std::optional<StopReason> stop;
  std::vector<TraceRow> trace;

  GammaStepResult gs = std::move(entry);
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    if (iter > 1) {
      gs = gamma_step(sys, V, cfg);
      if (gs.unbounded) {
        last_good = make_certificate(V, gs.gamma, global_s0(gs), {}, iter, true);
        trace.push_back(TraceRow{round_index, iter, gs.gamma, {}, gs.sdp_iters, 0, 0});
        stop = StopReason::global_stability;
        break;
      }
    }

    TraceRow row{round_index, iter, gs.gamma, {}, gs.sdp_iters, 0, 0};
    std::vector<CertifiedShape> certified;
    for (std::size_t i = 0; i < nshapes; ++i) {
      BetaStepResult bs = beta_step(sys, V, gs.gamma, shape_polys[i], cfg, prev_betas[i],
                                    static_cast<int>(i));
      row.sdp_iters_beta += bs.sdp_iters;
      row.betas.push_back(bs.beta);
      certified.emplace_back(shape_fns[i], bs.beta, bs.s);
    }

    last_good = make_certificate(V, gs.gamma, gs.s0, certified, iter, false);

    // Progress measured on the betas (or the level when there are none).
    double max_rel_inc;
    if (nshapes > 0) {
      max_rel_inc = 0.0;
      for (std::size_t i = 0; i < nshapes; ++i) {
        const double base = std::max(std::abs(prev_betas[i]), 1e-9);
        max_rel_inc = std::max(max_rel_inc, (row.betas[i] - prev_betas[i]) / base);
      }
      prev_betas = row.betas;
    } else {
      max_rel_inc = std::isnan(prev_gamma)
                        ? std::numeric_limits<double>::infinity()
                        : (gs.gamma - prev_gamma) / std::max(std::abs(prev_gamma), 1e-9);
      prev_gamma = gs.gamma;
    }
    stall_streak = max_rel_inc < cfg.beta_stall_tol ? stall_streak + 1 : 0;
    if (stall_streak >= 2) {
      trace.push_back(std::move(row));
      stop = StopReason::beta_stalled;
      break;
    }
    if (iter == cfg.max_iters) {
      trace.push_back(std::move(row));
      stop = StopReason::max_iters;
      break;
    }

    VStepResult vs = v_step(sys, gs.gamma, gs.s0, certified, cfg);
    row.sdp_iters_v = vs.sdp_iters;
    trace.push_back(std::move(row));
    if (!vs.V) {
      stop = StopReason::v_step_infeasible;
      break;
    }
    // Normalizing by the current level keeps the next gamma-step near 1.
    V = *vs.V * (1.0 / gs.gamma);
  }

  RoundResult rr(std::move(*last_good), *stop);
  rr.trace = std::move(trace);
  return rr;
}

MultiRoundResult run_multiround(const DynamicalSystem& sys, const std::vector<RoundConfig>& rounds,
                                const IterationConfig& cfg) {
  if (rounds.empty()) throw std::invalid_argument("at least one round is required");
  cfg.validate(sys, rounds);

  MultiRoundResult out;
  Polynomial V = initial_candidate(sys);
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    RoundResult rr = run_round(sys, V, rounds[k], cfg, static_cast<int>(k) + 1);
    for (const TraceRow& row : rr.trace) out.trace.push_back(row);
    const bool global = rr.certificate.global_stability;
    if (k + 1 < rounds.size() && !global) V = rr.certificate.V * (1.0 / rr.certificate.gamma);
    out.rounds.push_back(std::move(rr));
    if (global) break;
  }
  return out;
}

ReplayReport replay_certificate(const DynamicalSystem& sys, const Certificate& cert,
                                const IterationConfig& cfg) {
  ReplayReport rep;
  rep.ok = true;
  // Exact re-matching of a stored identity can land a hair outside the cone,
  // so membership is measured as the distance to it and compared against a
  // slack proportional to the identity's coefficient scale.
  auto check = [&](const Polynomial& p, const std::string& what) {
    double scale = 1.0;
    for (const auto& [m, c] : p.terms()) scale = std::max(scale, std::abs(c));
    const double tol = 1e-6 * scale;
    SosDistance d = sos_distance(p, cfg.sdp);
    const double t = d.status == SdpStatus::feasible ? std::max(d.t, 0.0)
                                                     : std::numeric_limits<double>::infinity();
    rep.max_residual = std::max(rep.max_residual, t);
    if (t > tol) {
      rep.ok = false;
      rep.failures.push_back(what + " (cone distance " + format_double(t) + ", allowed " +
                             format_double(tol) + ")");
    }
  };

  const int n = cert.nvars;
  check(cert.V - cfg.l1, "V positivity");
  check(-lie_derivative(cert.V, sys) - cfg.l2 +
            (cert.V - Polynomial::constant(n, cert.gamma)) * cert.s0,
        "decrease certificate");
  check(cert.s0, "s0 membership");
  for (std::size_t i = 0; i < cert.shapes.size(); ++i) {
    const CertifiedShape& cs = cert.shapes[i];
    check(Polynomial::constant(n, cert.gamma) - cert.V +
              (cs.shape.to_polynomial() - Polynomial::constant(n, cs.beta)) * cs.s,
          "containment certificate " + std::to_string(i));
    check(cs.s, "shape multiplier " + std::to_string(i));
  }
  return rep;
}

}  // namespace roa
