#pragma once

#include <Eigen/Dense>

#include <string>

namespace regint {

/// min c·x  subject to  A x = b,  x ≥ 0.
struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  /// Columns that may start in the basis as slacks (unit column, b_row ≥ 0); −1 for none.
  Eigen::VectorXi initial_basis;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0;
  Eigen::VectorXd x;
  long iterations = 0;
};

/// Dense two-phase tableau simplex. Dantzig pricing; Bland's rule takes over
/// after a run of degenerate pivots and stays until progress resumes.
LpResult solve_lp(const LinearProgram& lp, long max_iterations = 200000);

/// Plain-text dump: objective row, then one row per constraint "a_1 … a_n | b".
std::string dump_lp(const LinearProgram& lp);

}  // namespace regint
