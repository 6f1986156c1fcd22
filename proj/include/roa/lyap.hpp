#pragma once

// Quadratic Lyapunov candidates for the linearization at the origin: solves
// A' P + P A = -Q for symmetric P and returns V0 = x' P x.

#include <Eigen/Dense>
#include <stdexcept>

#include "roa/poly.hpp"

namespace roa {

class NotHurwitz : public std::runtime_error {
 public:
  explicit NotHurwitz(double max_real_part)
      : std::runtime_error("linearization is not Hurwitz (max eigenvalue real part " +
                           std::to_string(max_real_part) + ")"),
        max_real_part_(max_real_part) {}
  double max_real_part() const { return max_real_part_; }

 private:
  double max_real_part_;
};

// Jacobian of f at the origin (the linear coefficients of each component).
Eigen::MatrixXd linearize(const DynamicalSystem& sys);

// Solves A' P + P A = -Q over symmetric P as a dense linear system.
// Requires A Hurwitz (max real eigenvalue part <= -1e-9) and Q SPD; the
// returned P satisfies the equation with max residual <= 1e-10.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

// V0(x) = x' P x for the linearization with Q = I (or a caller-provided Q).
Polynomial initial_candidate(const DynamicalSystem& sys);
Polynomial initial_candidate(const DynamicalSystem& sys, const Eigen::MatrixXd& Q);

// x' P x as a polynomial, for symmetric P.
Polynomial quadratic_form(const Eigen::MatrixXd& P);

}  // namespace roa
