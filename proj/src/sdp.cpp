#include "roa/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace roa {

int SdpProblem::block_index(int id) const {
  for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
    if (blocks[i].id == id) return i;
  return -1;
}

namespace {

void validate_entry(const SdpProblem& p, const SdpEntry& e) {
  if (e.block < 0 || e.block >= static_cast<int>(p.blocks.size()))
    throw std::invalid_argument("sdp entry references unknown block");
  const int side = p.blocks[e.block].side;
  if (e.row < 0 || e.col < e.row || e.col >= side)
    throw std::invalid_argument("sdp entry indices must satisfy 0 <= row <= col < side");
}

}  // namespace

void SdpProblem::validate() const {
  for (const SdpBlock& b : blocks)
    if (b.side <= 0) throw std::invalid_argument("sdp block side must be positive");
  for (const SdpRow& r : rows) {
    if (r.entries.empty()) throw std::invalid_argument("sdp row without entries");
    for (const SdpEntry& e : r.entries) validate_entry(*this, e);
  }
  for (const SdpEntry& e : objective) validate_entry(*this, e);
}

namespace {

std::string fmt(double v) {
  char buf[48];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

void SdpProblem::dump(std::ostream& os) const {
  os << "sdp-problem v1\n";
  os << "blocks " << blocks.size() << "\n";
  for (const SdpBlock& b : blocks) os << "  block id " << b.id << " side " << b.side << "\n";
  os << "rows " << rows.size() << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "  row " << i << " rhs " << fmt(rows[i].rhs) << " :";
    for (const SdpEntry& e : rows[i].entries)
      os << " (" << e.block << "," << e.row << "," << e.col << "," << fmt(e.coeff) << ")";
    os << "\n";
  }
  os << "objective " << objective.size() << " :";
  for (const SdpEntry& e : objective)
    os << " (" << e.block << "," << e.row << "," << e.col << "," << fmt(e.coeff) << ")";
  os << "\n";
}

void write_sdp_solution(std::ostream& os, const SdpProblem& problem, const SdpSolution& sol) {
  os << "sdp-solution v1\n";
  os << "status "
     << (sol.status == SdpStatus::feasible
             ? "feasible"
             : sol.status == SdpStatus::infeasible ? "infeasible" : "marginal")
     << "\n";
  os << "iterations " << sol.iterations << "\n";
  os << "eq_residual " << fmt(sol.eq_residual) << "\n";
  os << "min_eigenvalue " << fmt(sol.min_eigenvalue) << "\n";
  for (std::size_t k = 0; k < sol.block_values.size(); ++k) {
    const Eigen::MatrixXd& X = sol.block_values[k];
    os << "block id " << problem.blocks[k].id << " side " << X.rows() << "\n";
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      for (Eigen::Index c = 0; c < X.cols(); ++c) os << (c ? " " : "") << fmt(X(r, c));
      os << "\n";
    }
  }
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

inline int tri_size(int side) { return side * (side + 1) / 2; }
inline int svec_index(int r, int c) { return c * (c + 1) / 2 + r; }  // r <= c

void sym_to_svec(const Eigen::MatrixXd& X, Eigen::Ref<Eigen::VectorXd> v) {
  const int s = static_cast<int>(X.rows());
  int k = 0;
  for (int c = 0; c < s; ++c)
    for (int r = 0; r <= c; ++r, ++k) v[k] = r == c ? X(r, c) : kSqrt2 * X(r, c);
}

void svec_to_sym(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::MatrixXd& X) {
  const int s = static_cast<int>(X.rows());
  int k = 0;
  for (int c = 0; c < s; ++c)
    for (int r = 0; r <= c; ++r, ++k) {
      double val = r == c ? v[k] : v[k] / kSqrt2;
      X(r, c) = val;
      X(c, r) = val;
    }
}

// Per-block constraint data restricted to the rows that touch the block.
struct BlockData {
  int side = 0;
  int ns = 0;
  std::vector<int> touch;          // global row indices, ascending
  Eigen::MatrixXd A;               // touch.size() x ns, isometric-svec coefficients
  Eigen::VectorXd c;               // ns
};

struct Workspace {
  // Frequently reused per-block temporaries to avoid reallocation.
  Eigen::MatrixXd T1, T2;
};

Eigen::VectorXd hinv_apply(const Eigen::MatrixXd& W, const Eigen::VectorXd& v, Workspace& ws) {
  const int s = static_cast<int>(W.rows());
  ws.T1.resize(s, s);
  svec_to_sym(v, ws.T1);
  ws.T2.noalias() = W * ws.T1 * W;
  Eigen::VectorXd out(tri_size(s));
  sym_to_svec(ws.T2, out);
  return out;
}

// Largest alpha with X + alpha * dX staying in the cone, given X = L L'.
double max_step(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& dX,
                Workspace& ws) {
  const auto& L = llt.matrixL();
  ws.T1 = L.solve(dX);
  ws.T2 = L.solve(ws.T1.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ws.T2 + ws.T2.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  if (lo >= -1e-16) return 1e30;
  return 1.0 / -lo;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts) {
  problem.validate();
  const int nb = static_cast<int>(problem.blocks.size());
  const int m = static_cast<int>(problem.rows.size());
  const bool has_objective = !problem.objective.empty();

  SdpSolution sol;
  if (nb == 0) {
    sol.status = m == 0 ? SdpStatus::feasible : SdpStatus::infeasible;
    return sol;
  }

  // Restrict each block's constraint matrix to the rows touching it.
  std::vector<BlockData> blk(nb);
  {
    std::vector<std::vector<int>> touch_sets(nb);
    std::vector<std::vector<char>> seen(nb);
    for (int k = 0; k < nb; ++k) {
      blk[k].side = problem.blocks[k].side;
      blk[k].ns = tri_size(blk[k].side);
      seen[k].assign(m, 0);
    }
    for (int i = 0; i < m; ++i)
      for (const SdpEntry& e : problem.rows[i].entries)
        if (!seen[e.block][i]) {
          seen[e.block][i] = 1;
          touch_sets[e.block].push_back(i);
        }
    std::vector<std::vector<int>> local(nb);
    for (int k = 0; k < nb; ++k) {
      blk[k].touch = std::move(touch_sets[k]);
      blk[k].A = Eigen::MatrixXd::Zero(blk[k].touch.size(), blk[k].ns);
      blk[k].c = Eigen::VectorXd::Zero(blk[k].ns);
      local[k].assign(m, -1);
      for (int t = 0; t < static_cast<int>(blk[k].touch.size()); ++t) local[k][blk[k].touch[t]] = t;
    }
    for (int i = 0; i < m; ++i)
      for (const SdpEntry& e : problem.rows[i].entries) {
        const double v = e.row == e.col ? e.coeff : e.coeff / kSqrt2;
        blk[e.block].A(local[e.block][i], svec_index(e.row, e.col)) += v;
      }
    for (const SdpEntry& e : problem.objective) {
      const double v = e.row == e.col ? e.coeff : e.coeff / kSqrt2;
      blk[e.block].c[svec_index(e.row, e.col)] += v;
    }
  }

  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b[i] = problem.rows[i].rhs;

  double nu = 0;
  for (int k = 0; k < nb; ++k) nu += blk[k].side;

  // Iterates: per-block svec vectors, dual vector, homogenizing scalars.
  std::vector<Eigen::VectorXd> x(nb), s(nb);
  for (int k = 0; k < nb; ++k) {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(blk[k].side, blk[k].side);
    x[k].resize(blk[k].ns);
    sym_to_svec(I, x[k]);
    s[k] = x[k];
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;

  Workspace ws;
  std::vector<Eigen::MatrixXd> Xm(nb), Sm(nb), W(nb), Winv(nb);
  std::vector<Eigen::LLT<Eigen::MatrixXd>> lltX(nb), lltS(nb);

  auto apply_A = [&](const std::vector<Eigen::VectorXd>& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < nb; ++k) {
      Eigen::VectorXd part = blk[k].A * v[k];
      for (int t = 0; t < static_cast<int>(blk[k].touch.size()); ++t) out[blk[k].touch[t]] += part[t];
    }
    return out;
  };
  auto apply_At = [&](const Eigen::VectorXd& yy, int k) {
    Eigen::VectorXd yt(blk[k].touch.size());
    for (int t = 0; t < static_cast<int>(blk[k].touch.size()); ++t) yt[t] = yy[blk[k].touch[t]];
    return Eigen::VectorXd(blk[k].A.transpose() * yt);
  };
  auto dot_blocks = [&](const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& bb) {
    double v = 0;
    for (int k = 0; k < nb; ++k) v += a[k].dot(bb[k]);
    return v;
  };

  auto finalize_feasible = [&]() {
    sol.status = SdpStatus::feasible;
    sol.block_values.resize(nb);
    double min_eig = 1e300;
    for (int k = 0; k < nb; ++k) {
      sol.block_values[k].resize(blk[k].side, blk[k].side);
      Eigen::VectorXd xs = x[k] / tau;
      svec_to_sym(xs, sol.block_values[k]);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.block_values[k], Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues()(0));
    }
    sol.min_eigenvalue = min_eig;
    Eigen::VectorXd r = apply_A(x) / tau - b;
    sol.eq_residual = m > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
    sol.y = y / tau;
    if (has_objective) {
      double cx = 0;
      for (int k = 0; k < nb; ++k) cx += blk[k].c.dot(x[k]);
      sol.objective = cx / tau;
    }
  };

  std::vector<Eigen::VectorXd> Fd(nb), dc(nb), ur(nb), uc(nb);
  std::vector<Eigen::VectorXd> dx1(nb), dx2(nb), dxa(nb), dsa(nb), dxc(nb), dsc(nb);
  Eigen::MatrixXd M(m, m);

  // Best iterate that already cleared eq_tol, kept so a later stall does not
  // forfeit a perfectly usable feasible point.  With an objective the measure
  // mu ranks iterates instead: the dual residual can blow up from cancellation
  // once the path nears the boundary, while the primal point it ranks is
  // within O(mu) of optimal.
  double best_pres = 1e300;
  double best_mu = 1e300;
  std::vector<Eigen::VectorXd> best_x;
  Eigen::VectorXd best_y;
  double best_tau = 1.0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    sol.iterations = iter;

    // Scaling point and residuals.
    bool cone_ok = true;
    for (int k = 0; k < nb; ++k) {
      Xm[k].resize(blk[k].side, blk[k].side);
      Sm[k].resize(blk[k].side, blk[k].side);
      svec_to_sym(x[k], Xm[k]);
      svec_to_sym(s[k], Sm[k]);
      lltX[k].compute(Xm[k]);
      lltS[k].compute(Sm[k]);
      if (lltX[k].info() != Eigen::Success || lltS[k].info() != Eigen::Success) {
        cone_ok = false;
        break;
      }
      Eigen::MatrixXd Lx = lltX[k].matrixL();
      Eigen::MatrixXd Ls = lltS[k].matrixL();
      Eigen::MatrixXd K = Ls.transpose() * Lx;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 0) {
        cone_ok = false;
        break;
      }
      Eigen::MatrixXd Vs = svd.matrixV();
      W[k].noalias() = Lx * Vs * sv.cwiseInverse().asDiagonal() * Vs.transpose() * Lx.transpose();
      Eigen::MatrixXd LxinvT = Lx.transpose().triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(blk[k].side, blk[k].side));
      Winv[k].noalias() = LxinvT * Vs * sv.asDiagonal() * Vs.transpose() * LxinvT.transpose();
      W[k] = 0.5 * (W[k] + W[k].transpose());
      Winv[k] = 0.5 * (Winv[k] + Winv[k].transpose());
    }
    if (!cone_ok) break;

    Eigen::VectorXd Ax = apply_A(x);
    Eigen::VectorXd Fp = Ax - b * tau;
    double cx = 0;
    for (int k = 0; k < nb; ++k) cx += blk[k].c.dot(x[k]);
    const double by = b.dot(y);
    const double Fg = cx - by + kappa;
    const double xs = dot_blocks(x, s);
    const double mu = (xs + tau * kappa) / (nu + 1.0);

    for (int k = 0; k < nb; ++k) Fd[k] = apply_At(y, k) + s[k] - blk[k].c * tau;

    // Termination tests on the de-homogenized iterate.
    const double pres = m > 0 ? Fp.cwiseAbs().maxCoeff() / tau : 0.0;
    if (pres <= opts.eq_tol && (has_objective ? mu < best_mu : pres < best_pres)) {
      best_pres = pres;
      best_mu = mu;
      best_x = x;
      best_y = y;
      best_tau = tau;
    }
    if (!has_objective) {
      if (pres <= opts.eq_tol * opts.early_exit_factor) {
        finalize_feasible();
        return sol;
      }
    } else {
      double dres = 0;
      for (int k = 0; k < nb; ++k) {
        ws.T1.resize(blk[k].side, blk[k].side);
        svec_to_sym(Fd[k], ws.T1);
        dres = std::max(dres, ws.T1.cwiseAbs().maxCoeff() / tau);
      }
      const double pobj = cx / tau, dobj = by / tau;
      const double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (pres <= opts.eq_tol && dres <= opts.eq_tol && gap_rel <= opts.gap_tol) {
        finalize_feasible();
        return sol;
      }
    }
    if (by > 0) {
      // Candidate Farkas certificate: A' (y/by) + S/by = tau c / by -> 0.
      double res_inf = 0;
      for (int k = 0; k < nb; ++k) {
        Eigen::VectorXd v = (apply_At(y, k) + s[k] - blk[k].c * tau) / by;
        ws.T1.resize(blk[k].side, blk[k].side);
        svec_to_sym(v, ws.T1);
        res_inf = std::max(res_inf, ws.T1.cwiseAbs().maxCoeff());
      }
      // The certificate must witness A'yhat <= 0 exactly through shat >= 0;
      // tau c/by contaminates it unless tau is already negligible.
      double tc = 0;
      for (int k = 0; k < nb; ++k) tc = std::max(tc, blk[k].c.cwiseAbs().maxCoeff());
      res_inf += tau / by * tc;
      if (res_inf <= opts.eq_tol && kappa > 1e3 * tau) {
        sol.status = SdpStatus::infeasible;
        sol.y = y / by;
        sol.infeas_residual = res_inf;
        return sol;
      }
    }

    // Schur complement M = A Hinv A'.
    M.setZero();
    for (int k = 0; k < nb; ++k) {
      const int t = static_cast<int>(blk[k].touch.size());
      if (t == 0) continue;
      Eigen::MatrixXd HA(t, blk[k].ns);
      for (int i = 0; i < t; ++i)
        HA.row(i) = hinv_apply(W[k], blk[k].A.row(i).transpose(), ws).transpose();
      Eigen::MatrixXd P(t, t);
      P.noalias() = HA * blk[k].A.transpose();
      for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) M(blk[k].touch[i], blk[k].touch[j]) += P(i, j);
    }
    M = 0.5 * (M + M.transpose());

    Eigen::LLT<Eigen::MatrixXd> lltM;
    {
      double jitter = 0.0;
      const double scale = std::max(M.diagonal().maxCoeff(), 1e-300);
      for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd Mj = M;
        if (jitter > 0) Mj.diagonal().array() += jitter * scale;
        lltM.compute(Mj);
        if (lltM.info() == Eigen::Success) break;
        jitter = jitter == 0 ? 1e-14 : jitter * 1e3;
      }
      if (lltM.info() != Eigen::Success) break;
    }

    for (int k = 0; k < nb; ++k) uc[k] = hinv_apply(W[k], blk[k].c, ws);
    Eigen::VectorXd dy2 = lltM.solve(apply_A(uc) + b);
    for (int k = 0; k < nb; ++k) dx2[k] = hinv_apply(W[k], apply_At(dy2, k), ws) - uc[k];
    double cdx2 = 0;
    for (int k = 0; k < nb; ++k) cdx2 += blk[k].c.dot(dx2[k]);
    const double denom = cdx2 - b.dot(dy2) - kappa / tau;
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300) break;

    // One Newton solve for a given centering weight; returns the step data.
    double dtau = 0, dkappa = 0;
    auto newton = [&](double sigma, double tk, std::vector<Eigen::VectorXd>& dx,
                      std::vector<Eigen::VectorXd>& ds, Eigen::VectorXd& dy_out) {
      const double eta = 1.0 - sigma;
      for (int k = 0; k < nb; ++k) {
        if (sigma > 0) {
          Eigen::MatrixXd Xinv = lltX[k].solve(Eigen::MatrixXd::Identity(blk[k].side, blk[k].side));
          Xinv = 0.5 * (Xinv + Xinv.transpose());
          Eigen::VectorXd xi(blk[k].ns);
          sym_to_svec(Xinv, xi);
          dc[k] = sigma * mu * xi - s[k];
        } else {
          dc[k] = -s[k];
        }
        ur[k] = hinv_apply(W[k], dc[k] + eta * Fd[k], ws);
      }
      Eigen::VectorXd dy1 = lltM.solve(-eta * Fp - apply_A(ur));
      for (int k = 0; k < nb; ++k) dx1[k] = hinv_apply(W[k], apply_At(dy1, k), ws) + ur[k];
      double cdx1 = 0;
      for (int k = 0; k < nb; ++k) cdx1 += blk[k].c.dot(dx1[k]);
      const double num = -eta * Fg - cdx1 + b.dot(dy1) - tk / tau;
      dtau = num / denom;
      dy_out = dy1 + dtau * dy2;
      for (int k = 0; k < nb; ++k) {
        dx[k] = dx1[k] + dtau * dx2[k];
        ws.T1.resize(blk[k].side, blk[k].side);
        svec_to_sym(dx[k], ws.T1);
        ws.T2.noalias() = Winv[k] * ws.T1 * Winv[k];
        Eigen::VectorXd hx(blk[k].ns);
        sym_to_svec(0.5 * (ws.T2 + ws.T2.transpose()), hx);
        ds[k] = dc[k] - hx;
      }
      dkappa = (tk - kappa * dtau) / tau;
    };

    auto boundary = [&](const std::vector<Eigen::VectorXd>& dx,
                        const std::vector<Eigen::VectorXd>& ds, double dt, double dk) {
      double a = 1e30;
      for (int k = 0; k < nb; ++k) {
        ws.T1.resize(blk[k].side, blk[k].side);
        svec_to_sym(dx[k], ws.T1);
        a = std::min(a, max_step(lltX[k], ws.T1, ws));
        svec_to_sym(ds[k], ws.T1);
        a = std::min(a, max_step(lltS[k], ws.T1, ws));
      }
      if (dt < 0) a = std::min(a, tau / -dt);
      if (dk < 0) a = std::min(a, kappa / -dk);
      return a;
    };

    // Affine scout step fixes the centering weight.
    Eigen::VectorXd dya, dyc;
    newton(0.0, -tau * kappa, dxa, dsa, dya);
    const double dtau_a = dtau, dkappa_a = dkappa;
    const double alpha_a = std::min(1.0, boundary(dxa, dsa, dtau_a, dkappa_a));
    double mu_aff = 0;
    for (int k = 0; k < nb; ++k) mu_aff += (x[k] + alpha_a * dxa[k]).dot(s[k] + alpha_a * dsa[k]);
    mu_aff += (tau + alpha_a * dtau_a) * (kappa + alpha_a * dkappa_a);
    mu_aff = std::max(mu_aff / (nu + 1.0), 0.0);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::min(std::max(sigma, 1e-8), 0.999);

    newton(sigma, sigma * mu - tau * kappa - dtau_a * dkappa_a, dxc, dsc, dyc);
    const double alpha = std::min(1.0, 0.98 * boundary(dxc, dsc, dtau, dkappa));
    if (!(alpha > 1e-10)) break;

    for (int k = 0; k < nb; ++k) {
      x[k] += alpha * dxc[k];
      s[k] += alpha * dsc[k];
    }
    y += alpha * dyc;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (!(tau > 0) || !std::isfinite(tau) || !std::isfinite(kappa)) break;
  }

  if (!best_x.empty()) {
    x = best_x;
    y = best_y;
    tau = best_tau;
    finalize_feasible();
    return sol;
  }

  // No conclusive certificate within budget.
  sol.status = SdpStatus::marginal;
  Eigen::VectorXd r = apply_A(x) / tau - b;
  sol.eq_residual = m > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  sol.y = y / tau;
  return sol;
}

}  // namespace roa
