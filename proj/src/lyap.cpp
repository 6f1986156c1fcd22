#include "roa/lyap.hpp"

#include <Eigen/Eigenvalues>

namespace roa {

Eigen::MatrixXd linearize(const DynamicalSystem& sys) {
  sys.validate();
  const int n = sys.nvars;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> e(n, 0);
      e[j] = 1;
      A(i, j) = sys.f[i].coefficient(Monomial(e));
    }
  return A;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("dimension mismatch");
  if (!Q.isApprox(Q.transpose(), 1e-12)) throw std::invalid_argument("Q must be symmetric");
  {
    Eigen::LLT<Eigen::MatrixXd> llt(Q);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("Q must be positive definite");
  }
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    const double max_re = es.eigenvalues().real().maxCoeff();
    if (max_re > -1e-9) throw NotHurwitz(max_re);
  }

  // Unknowns: upper triangle of P, column-major.  Equation (r,c) of
  // A'P + PA = -Q reads sum_k A(k,r) P(k,c) + P(r,k) A(k,c) = -Q(r,c);
  // only the upper triangle is needed by symmetry.
  const int ns = n * (n + 1) / 2;
  auto uidx = [](int r, int c) { return c * (c + 1) / 2 + r; };  // r <= c
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ns, ns);
  Eigen::VectorXd rhs(ns);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= c; ++r) {
      const int row = uidx(r, c);
      rhs[row] = -Q(r, c);
      for (int k = 0; k < n; ++k) {
        M(row, uidx(std::min(k, c), std::max(k, c))) += A(k, r);
        M(row, uidx(std::min(r, k), std::max(r, k))) += A(k, c);
      }
    }
  Eigen::VectorXd p = M.fullPivLu().solve(rhs);

  Eigen::MatrixXd P(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= c; ++r) {
      P(r, c) = p[uidx(r, c)];
      P(c, r) = p[uidx(r, c)];
    }
  const double residual = (A.transpose() * P + P * A + Q).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("Lyapunov solve residual " + std::to_string(residual) +
                             " exceeds 1e-10");
  return P;
}

Polynomial quadratic_form(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  Polynomial v(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> e(n, 0);
      e[i] += 1;
      e[j] += 1;
      v.add_term(Monomial(std::move(e)), P(i, j));
    }
  return v;
}

Polynomial initial_candidate(const DynamicalSystem& sys, const Eigen::MatrixXd& Q) {
  return quadratic_form(solve_lyapunov(linearize(sys), Q));
}

Polynomial initial_candidate(const DynamicalSystem& sys) {
  return initial_candidate(sys, Eigen::MatrixXd::Identity(sys.nvars, sys.nvars));
}

}  // namespace roa
