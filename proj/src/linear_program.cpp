#include "zest/linear_program.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace zest::lp {

Problem::Problem(int num_vars)
    : cost(Eigen::VectorXd::Zero(num_vars)),
      eq_matrix(0, num_vars),
      eq_rhs(0),
      ub_matrix(0, num_vars),
      ub_rhs(0),
      lower(Eigen::VectorXd::Constant(num_vars, -kInf)),
      upper(Eigen::VectorXd::Constant(num_vars, kInf)) {}

namespace {

// x_i = offset + sign * y[pos] - (neg >= 0 ? y[neg] : 0)
struct VarMap {
  double offset = 0.0;
  double sign = 1.0;
  int pos = -1;
  int neg = -1;
};

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  int rows() const { return static_cast<int>(basis_.size()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  double& at(int r, int c) { return t_(r, c); }
  double& rhs(int r) { return t_(r, cols()); }
  std::vector<int>& basis() { return basis_; }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r < t_.rows(); ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f != 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Objective row holds reduced costs d_j = c_j - c_B' B^{-1} a_j and -objective.
  void load_objective(const Eigen::VectorXd& cost) {
    const int m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = cost.transpose();
    for (int r = 0; r < m; ++r) {
      const double cb = cost(basis_[r]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(r);
    }
  }

  double objective() { return -t_(rows(), cols()); }

  Status optimize(const std::vector<bool>& allowed, const Options& opt, int& iterations) {
    const int m = rows();
    const int n = cols();
    bool bland = false;
    int degenerate_run = 0;
    while (true) {
      if (++iterations > opt.max_iterations) return Status::kIterationLimit;
      int enter = -1;
      double best = -1e-10;
      for (int j = 0; j < n; ++j) {
        if (!allowed[j]) continue;
        const double d = t_(m, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Status::kOptimal;

      int leave = -1;
      double best_ratio = kInf;
      for (int r = 0; r < m; ++r) {
        const double a = t_(r, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = std::max(t_(r, n), 0.0) / a;
        if (ratio < best_ratio - 1e-14 ||
            (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 && basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return Status::kUnbounded;

      degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
      if (degenerate_run > 50) bland = true;
      pivot(leave, enter);
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  const int nx = p.num_vars();
  if (p.eq_matrix.cols() != nx || p.ub_matrix.cols() != nx || p.eq_rhs.size() != p.eq_matrix.rows() ||
      p.ub_rhs.size() != p.ub_matrix.rows() || p.lower.size() != nx || p.upper.size() != nx) {
    throw std::invalid_argument("lp::solve: inconsistent problem dimensions");
  }

  std::vector<VarMap> vars(nx);
  int ny = 0;
  std::vector<std::pair<int, double>> bound_rows;  // y[col] <= width
  for (int i = 0; i < nx; ++i) {
    const double lo = p.lower(i);
    const double hi = p.upper(i);
    if (lo > hi) return Solution{Status::kInfeasible, {}, 0.0, lo - hi};
    VarMap& v = vars[i];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.pos = ny++;
      if (std::isfinite(hi)) bound_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      v.pos = ny++;
    } else {
      v.pos = ny++;
      v.neg = ny++;
    }
  }

  const int n_eq = static_cast<int>(p.eq_matrix.rows());
  const int n_ub = static_cast<int>(p.ub_matrix.rows());
  const int n_bd = static_cast<int>(bound_rows.size());
  const int m = n_eq + n_ub + n_bd;
  const int n_slack = n_ub + n_bd;

  // Structural rows in y-space.
  Eigen::MatrixXd rows_y = Eigen::MatrixXd::Zero(m, ny);
  Eigen::VectorXd rhs(m);
  auto map_row = [&](const Eigen::RowVectorXd& a, double b, int r) {
    double shift = 0.0;
    for (int i = 0; i < nx; ++i) {
      if (a(i) == 0.0) continue;
      const VarMap& v = vars[i];
      shift += a(i) * v.offset;
      rows_y(r, v.pos) += a(i) * v.sign;
      if (v.neg >= 0) rows_y(r, v.neg) -= a(i);
    }
    rhs(r) = b - shift;
  };
  for (int r = 0; r < n_eq; ++r) map_row(p.eq_matrix.row(r), p.eq_rhs(r), r);
  for (int r = 0; r < n_ub; ++r) map_row(p.ub_matrix.row(r), p.ub_rhs(r), n_eq + r);
  for (int k = 0; k < n_bd; ++k) {
    rows_y(n_eq + n_ub + k, bound_rows[k].first) = 1.0;
    rhs(n_eq + n_ub + k) = bound_rows[k].second;
  }

  // Artificial variable for every row whose slack cannot start basic.
  std::vector<int> needs_art;
  for (int r = 0; r < m; ++r) {
    if (r < n_eq || rhs(r) < 0.0) needs_art.push_back(r);
  }
  const int n_art = static_cast<int>(needs_art.size());
  const int cols = ny + n_slack + n_art;
  Tableau tab(m, cols);
  for (int r = 0; r < m; ++r) {
    const double s = rhs(r) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < ny; ++j) tab.at(r, j) = s * rows_y(r, j);
    if (r >= n_eq) tab.at(r, ny + (r - n_eq)) = s;
    tab.rhs(r) = s * rhs(r);
    if (r >= n_eq && s > 0.0) tab.basis()[r] = ny + (r - n_eq);
  }
  for (int k = 0; k < n_art; ++k) {
    const int r = needs_art[k];
    tab.at(r, ny + n_slack + k) = 1.0;
    tab.basis()[r] = ny + n_slack + k;
  }

  const double scale = 1.0 + (m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0);
  int iterations = 0;
  Solution sol;
  std::vector<bool> allowed(cols, true);

  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(n_art).setOnes();
    tab.load_objective(phase1);
    const Status st = tab.optimize(allowed, opt, iterations);
    if (st == Status::kIterationLimit) {
      sol.status = st;
      return sol;
    }
    sol.infeasibility = std::max(tab.objective(), 0.0);
    if (sol.infeasibility > opt.feasibility_tol * scale) {
      sol.status = Status::kInfeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (tab.basis()[r] < ny + n_slack) continue;
      int best = -1;
      double mag = opt.pivot_tol * 100.0;
      for (int j = 0; j < ny + n_slack; ++j) {
        if (std::abs(tab.at(r, j)) > mag) {
          mag = std::abs(tab.at(r, j));
          best = j;
        }
      }
      if (best >= 0) tab.pivot(r, best);
    }
    for (int k = 0; k < n_art; ++k) allowed[ny + n_slack + k] = false;
  }

  Eigen::VectorXd cost_y = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < nx; ++i) {
    const VarMap& v = vars[i];
    cost_y(v.pos) += p.cost(i) * v.sign;
    if (v.neg >= 0) cost_y(v.neg) -= p.cost(i);
  }
  tab.load_objective(cost_y);
  const Status st = tab.optimize(allowed, opt, iterations);
  sol.status = st;
  if (st != Status::kOptimal) return sol;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(cols);
  for (int r = 0; r < m; ++r) y(tab.basis()[r]) = tab.rhs(r);
  sol.x.resize(nx);
  for (int i = 0; i < nx; ++i) {
    const VarMap& v = vars[i];
    sol.x(i) = v.offset + v.sign * y(v.pos) - (v.neg >= 0 ? y(v.neg) : 0.0);
  }
  sol.objective = p.cost.dot(sol.x);
  return sol;
}

}  // namespace zest::lp
