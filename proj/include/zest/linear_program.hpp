#pragma once

#include <Eigen/Dense>

#include <limits>

namespace zest::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

// minimize cost' x
//   s.t. eq_matrix x == eq_rhs
//        ub_matrix x <= ub_rhs
//        lower <= x <= upper   (entries may be +-kInf)
struct Problem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ub_matrix;
  Eigen::VectorXd ub_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  explicit Problem(int num_vars);
  int num_vars() const { return static_cast<int>(cost.size()); }
};

struct Solution {
  Status status = Status::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  // Sum of absolute constraint violations left by phase one.
  double infeasibility = 0.0;
};

struct Options {
  // A phase-one residual at or below this (scaled by 1 + max |rhs|) counts as feasible.
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 20000;
};

// Dense two-phase tableau simplex. Small problems only (tens of variables).
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace zest::lp
