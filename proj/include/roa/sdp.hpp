#pragma once

// Dense primal-dual interior-point solver for semidefinite programs in
// block-diagonal standard form:
//
//   minimize    c . x
//   subject to  A x = b,   X_k positive semidefinite for every block k,
//
// where x stacks the upper triangles of the blocks.  The homogeneous
// self-dual embedding is used, so genuinely infeasible problems terminate
// with a Farkas certificate instead of diverging; that is what the callers'
// bisection loops rely on.

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace roa {

struct SdpBlock {
  int id = 0;  // caller's key, preserved in solutions
  int side = 0;
};

// One linear-functional coefficient: coeff multiplies Q[row,col] of the given
// block, with row <= col.  Off-diagonal coefficients must already account for
// the symmetric mirror entry.
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double coeff = 0.0;
};

struct SdpRow {
  std::vector<SdpEntry> entries;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<SdpBlock> blocks;
  std::vector<SdpRow> rows;
  std::vector<SdpEntry> objective;  // empty means pure feasibility

  int block_index(int id) const;  // -1 if absent
  void validate() const;
  // Deterministic text form for debugging and for problem archival.
  void dump(std::ostream& os) const;
};

enum class SdpStatus { feasible, infeasible, marginal };

struct SdpOptions {
  double eq_tol = 1e-7;    // max |A x - b| required of a feasible solution
  double psd_tol = 1e-8;   // eigenvalue floor tolerated in a feasible solution
  double gap_tol = 1e-8;   // relative duality gap for optimality
  int max_iters = 200;
  // Pure feasibility problems return as soon as the primal residual clears
  // eq_tol * early_exit_factor; the extra margin keeps downstream coefficient
  // replays comfortably inside their own tolerances.
  double early_exit_factor = 1e-2;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::marginal;
  std::vector<Eigen::MatrixXd> block_values;  // aligned with problem.blocks when feasible
  Eigen::VectorXd y;                          // dual / Farkas vector
  double objective = 0.0;
  double eq_residual = 0.0;      // max |A x - b| of the returned solution
  double min_eigenvalue = 0.0;   // min over blocks
  double infeas_residual = -1.0; // Farkas certificate residual when infeasible
  int iterations = 0;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts = {});

void write_sdp_solution(std::ostream& os, const SdpProblem& problem, const SdpSolution& sol);

}  // namespace roa
