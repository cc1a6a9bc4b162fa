#include "zest/constrained_zonotope.hpp"

#include "zest/linear_program.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace zest {

namespace {

MatrixXd remove_column(const MatrixXd& m, Eigen::Index col) {
  MatrixXd out(m.rows(), m.cols() - 1);
  out << m.leftCols(col), m.rightCols(m.cols() - col - 1);
  return out;
}

MatrixXd remove_row(const MatrixXd& m, Eigen::Index row) {
  MatrixXd out(m.rows() - 1, m.cols());
  out << m.topRows(row), m.bottomRows(m.rows() - row - 1);
  return out;
}

VectorXd remove_entry(const VectorXd& v, Eigen::Index i) {
  VectorXd out(v.size() - 1);
  out << v.head(i), v.tail(v.size() - i - 1);
  return out;
}

// Feasible factors: A b = rhs, lo <= b <= hi.
lp::Problem factor_problem(const MatrixXd& eq, const VectorXd& rhs, double bound) {
  lp::Problem p(static_cast<int>(eq.cols()));
  p.eq_matrix = eq;
  p.eq_rhs = rhs;
  p.lower.setConstant(-bound);
  p.upper.setConstant(bound);
  return p;
}

// Solves constraint row `row` for factor `col` and substitutes it everywhere.
ConstrainedZonotope eliminate(const ConstrainedZonotope& z, Eigen::Index row, Eigen::Index col) {
  const MatrixXd& a = z.con_matrix();
  const double pivot = a(row, col);
  const Eigen::RowVectorXd arow = a.row(row) / pivot;
  const double brow = z.con_rhs()(row) / pivot;

  const VectorXd c = z.center() + z.generators().col(col) * brow;
  const MatrixXd g = z.generators() - z.generators().col(col) * arow;
  const MatrixXd a2 = a - a.col(col) * arow;
  const VectorXd b2 = z.con_rhs() - a.col(col) * brow;
  return ConstrainedZonotope(c, remove_column(g, col), remove_column(remove_row(a2, row), col),
                             remove_entry(b2, row));
}

ConstrainedZonotope drop_constraint(const ConstrainedZonotope& z, Eigen::Index row) {
  return ConstrainedZonotope(z.center(), z.generators(), remove_row(z.con_matrix(), row),
                             remove_entry(z.con_rhs(), row));
}

double log_volume(const ConstrainedZonotope& z) {
  const IntervalVector hull = cz_interval_hull(z);
  double v = 0.0;
  for (Eigen::Index j = 0; j < hull.dim(); ++j) v += std::log(hull.upper(j) - hull.lower(j) + 1e-12);
  return v;
}

}  // namespace

ConstrainedZonotope::ConstrainedZonotope(VectorXd center, MatrixXd generators, MatrixXd con_matrix, VectorXd con_rhs)
    : center_(std::move(center)),
      generators_(std::move(generators)),
      con_matrix_(std::move(con_matrix)),
      con_rhs_(std::move(con_rhs)) {
  if (generators_.rows() != center_.size()) {
    if (generators_.size() != 0) throw std::invalid_argument("ConstrainedZonotope: generator rows != dimension");
    generators_.resize(center_.size(), 0);
  }
  if (con_matrix_.size() == 0 && con_rhs_.size() == 0) con_matrix_.resize(0, generators_.cols());
  if (con_matrix_.cols() != generators_.cols()) {
    throw std::invalid_argument("ConstrainedZonotope: constraint columns != generator count");
  }
  if (con_matrix_.rows() != con_rhs_.size()) {
    throw std::invalid_argument("ConstrainedZonotope: constraint rows != rhs length");
  }
  if (!center_.allFinite() || !generators_.allFinite() || !con_matrix_.allFinite() || !con_rhs_.allFinite()) {
    throw std::invalid_argument("ConstrainedZonotope: non-finite entries");
  }
}

ConstrainedZonotope::ConstrainedZonotope(const Zonotope& z)
    : ConstrainedZonotope(z.center(), z.generators(), MatrixXd(0, z.num_generators()), VectorXd(0)) {}

ConstrainedZonotope cz_from_zonotope(const Zonotope& z) { return ConstrainedZonotope(z); }

ConstrainedZonotope cz_intersect(const ConstrainedZonotope& a, const ConstrainedZonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("cz_intersect: dimension mismatch");
  const Eigen::Index n = a.dim();
  const Eigen::Index g1 = a.num_generators();
  const Eigen::Index g2 = b.num_generators();
  const Eigen::Index c1 = a.num_constraints();
  const Eigen::Index c2 = b.num_constraints();

  MatrixXd g = MatrixXd::Zero(n, g1 + g2);
  g.leftCols(g1) = a.generators();

  MatrixXd con = MatrixXd::Zero(c1 + c2 + n, g1 + g2);
  con.topLeftCorner(c1, g1) = a.con_matrix();
  con.block(c1, g1, c2, g2) = b.con_matrix();
  con.bottomLeftCorner(n, g1) = a.generators();
  con.bottomRightCorner(n, g2) = -b.generators();

  VectorXd rhs(c1 + c2 + n);
  rhs << a.con_rhs(), b.con_rhs(), b.center() - a.center();
  return ConstrainedZonotope(a.center(), std::move(g), std::move(con), std::move(rhs));
}

bool cz_contains_point(const ConstrainedZonotope& z, const VectorXd& x, double tol) {
  if (x.size() != z.dim()) throw std::invalid_argument("cz_contains_point: dimension mismatch");
  if (tol < 0.0) throw std::invalid_argument("cz_contains_point: negative tolerance");
  const Eigen::Index ng = z.num_generators();
  MatrixXd eq(z.dim() + z.num_constraints(), ng);
  eq << z.generators(), z.con_matrix();
  VectorXd rhs(eq.rows());
  rhs << x - z.center(), z.con_rhs();
  if (ng == 0) return rhs.lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + x.lpNorm<Eigen::Infinity>());
  const lp::Solution s = lp::solve(factor_problem(eq, rhs, 1.0 + tol));
  return s.status == lp::Status::kOptimal;
}

bool cz_is_empty(const ConstrainedZonotope& z) {
  if (z.num_constraints() == 0) return false;
  if (z.num_generators() == 0) return z.con_rhs().lpNorm<Eigen::Infinity>() > 1e-9;
  const lp::Solution s = lp::solve(factor_problem(z.con_matrix(), z.con_rhs(), 1.0));
  return s.status != lp::Status::kOptimal;
}

IntervalVector cz_interval_hull(const ConstrainedZonotope& z) {
  if (z.num_constraints() == 0) return interval_hull(z.unconstrained());
  if (cz_is_empty(z)) throw std::domain_error("cz_interval_hull: empty set");
  const Eigen::Index n = z.dim();
  VectorXd lo(n);
  VectorXd hi(n);
  lp::Problem p = factor_problem(z.con_matrix(), z.con_rhs(), 1.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    p.cost = z.generators().row(j).transpose();
    const lp::Solution smin = lp::solve(p);
    p.cost = -p.cost;
    const lp::Solution smax = lp::solve(p);
    if (smin.status != lp::Status::kOptimal || smax.status != lp::Status::kOptimal) {
      throw std::domain_error("cz_interval_hull: hull program failed");
    }
    lo(j) = z.center()(j) + smin.objective;
    hi(j) = z.center()(j) - smax.objective;
    if (hi(j) < lo(j)) hi(j) = lo(j);
  }
  return IntervalVector(lo, hi);
}

double cz_support_abs(const ConstrainedZonotope& z, const VectorXd& direction) {
  if (direction.size() != z.dim()) throw std::invalid_argument("cz_support_abs: dimension mismatch");
  const VectorXd w = z.generators().transpose() * direction;
  const double offset = direction.dot(z.center());
  if (z.num_constraints() == 0) return std::abs(offset) + w.lpNorm<1>();
  lp::Problem p = factor_problem(z.con_matrix(), z.con_rhs(), 1.0);
  p.cost = w;
  const lp::Solution smin = lp::solve(p);
  p.cost = -w;
  const lp::Solution smax = lp::solve(p);
  if (smin.status != lp::Status::kOptimal || smax.status != lp::Status::kOptimal) {
    throw std::domain_error("cz_support_abs: empty set");
  }
  return std::max(std::abs(offset + smin.objective), std::abs(offset - smax.objective));
}

ConstrainedZonotope cz_linear_map(const MatrixXd& map, const ConstrainedZonotope& z) {
  if (map.cols() != z.dim()) throw std::invalid_argument("cz_linear_map: dimension mismatch");
  return ConstrainedZonotope(map * z.center(), map * z.generators(), z.con_matrix(), z.con_rhs());
}

ConstrainedZonotope cz_minkowski_sum(const ConstrainedZonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("cz_minkowski_sum: dimension mismatch");
  MatrixXd g(a.dim(), a.num_generators() + b.num_generators());
  g << a.generators(), b.generators();
  MatrixXd con = MatrixXd::Zero(a.num_constraints(), g.cols());
  con.leftCols(a.num_generators()) = a.con_matrix();
  return ConstrainedZonotope(a.center() + b.center(), std::move(g), std::move(con), a.con_rhs());
}

ConstrainedZonotope cz_cartesian_product(const ConstrainedZonotope& a, const Zonotope& b) {
  const Eigen::Index n = a.dim();
  const Eigen::Index m = b.dim();
  VectorXd c(n + m);
  c << a.center(), b.center();
  MatrixXd g = MatrixXd::Zero(n + m, a.num_generators() + b.num_generators());
  g.topLeftCorner(n, a.num_generators()) = a.generators();
  g.bottomRightCorner(m, b.num_generators()) = b.generators();
  MatrixXd con = MatrixXd::Zero(a.num_constraints(), g.cols());
  con.leftCols(a.num_generators()) = a.con_matrix();
  return ConstrainedZonotope(std::move(c), std::move(g), std::move(con), a.con_rhs());
}

ConstrainedZonotope cz_reduce(const ConstrainedZonotope& z, double target_order, Eigen::Index target_constraints) {
  if (target_constraints < 0) throw std::invalid_argument("cz_reduce: negative constraint budget");
  const Eigen::Index n = z.dim();
  const Eigen::Index gen_budget = generator_budget(target_order, n);
  if (z.num_generators() <= gen_budget && z.num_constraints() <= target_constraints) return z;

  // Lifted Girard needs n + n_c box columns inside the generator budget.
  const Eigen::Index con_budget = std::min(target_constraints, std::max<Eigen::Index>(0, gen_budget - n));
  const bool nonempty = !cz_is_empty(z);

  ConstrainedZonotope cur = z;
  while (cur.num_constraints() > con_budget) {
    const MatrixXd& a = cur.con_matrix();
    Eigen::Index best_row = -1;
    double best_score = std::numeric_limits<double>::infinity();
    ConstrainedZonotope best;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Eigen::Index col = 0;
      const double mag = a.cols() > 0 ? a.row(i).cwiseAbs().maxCoeff(&col) : 0.0;
      const double scale = 1.0 + a.cwiseAbs().maxCoeff();
      ConstrainedZonotope cand = mag > 1e-12 * scale ? eliminate(cur, i, col) : drop_constraint(cur, i);
      const double score = nonempty ? log_volume(cand) : 0.0;
      if (score < best_score) {
        best_score = score;
        best_row = i;
        best = std::move(cand);
      }
      if (!nonempty) break;
    }
    if (best_row < 0) break;
    cur = std::move(best);
  }

  if (cur.num_generators() <= gen_budget) return cur;

  const Eigen::Index nc = cur.num_constraints();
  MatrixXd lifted(n + nc, cur.num_generators());
  lifted << cur.generators(), cur.con_matrix();
  const MatrixXd reduced = girard_reduce(lifted, gen_budget);
  return ConstrainedZonotope(cur.center(), reduced.topRows(n), reduced.bottomRows(nc), cur.con_rhs());
}

ConstrainedSampler::ConstrainedSampler(const ConstrainedZonotope& z) : set_(z) {
  const Eigen::Index ng = z.num_generators();
  if (z.num_constraints() == 0) {
    null_basis_ = MatrixXd::Identity(ng, ng);
    beta_ = VectorXd::Zero(ng);
    return;
  }
  // Deepest point: maximise s with -1 + s <= b <= 1 - s, A b = rhs.
  lp::Problem p(static_cast<int>(ng + 1));
  p.cost(ng) = -1.0;
  p.eq_matrix = MatrixXd::Zero(z.num_constraints(), ng + 1);
  p.eq_matrix.leftCols(ng) = z.con_matrix();
  p.eq_rhs = z.con_rhs();
  p.ub_matrix = MatrixXd::Zero(2 * ng, ng + 1);
  for (Eigen::Index i = 0; i < ng; ++i) {
    p.ub_matrix(2 * i, i) = 1.0;
    p.ub_matrix(2 * i, ng) = 1.0;
    p.ub_matrix(2 * i + 1, i) = -1.0;
    p.ub_matrix(2 * i + 1, ng) = 1.0;
  }
  p.ub_rhs = VectorXd::Ones(2 * ng);
  p.lower(ng) = 0.0;
  p.upper(ng) = 1.0;
  const lp::Solution s = lp::solve(p);
  if (s.status != lp::Status::kOptimal) {
    empty_ = true;
    return;
  }
  beta_ = s.x.head(ng);
  Eigen::FullPivLU<MatrixXd> lu(z.con_matrix());
  lu.setThreshold(1e-10);
  null_basis_ = lu.kernel();
  if (lu.rank() == ng) null_basis_.resize(ng, 0);
  // Orthonormalise for isotropic directions.
  if (null_basis_.cols() > 0) {
    Eigen::HouseholderQR<MatrixXd> qr(null_basis_);
    null_basis_ = qr.householderQ() * MatrixXd::Identity(ng, null_basis_.cols());
  }
}

VectorXd ConstrainedSampler::sample(std::mt19937_64& rng) {
  if (empty_) throw std::domain_error("ConstrainedSampler: empty set");
  if (set_.num_constraints() == 0) return sample_point(set_.unconstrained(), rng);
  const Eigen::Index k = null_basis_.cols();
  if (k > 0) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int step = 0; step < 8; ++step) {
      VectorXd dir_null(k);
      for (Eigen::Index i = 0; i < k; ++i) dir_null(i) = normal(rng);
      const VectorXd dir = null_basis_ * dir_null;
      double t_lo = -std::numeric_limits<double>::infinity();
      double t_hi = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < dir.size(); ++i) {
        if (std::abs(dir(i)) < 1e-14) continue;
        const double a = (-1.0 - beta_(i)) / dir(i);
        const double b = (1.0 - beta_(i)) / dir(i);
        t_lo = std::max(t_lo, std::min(a, b));
        t_hi = std::min(t_hi, std::max(a, b));
      }
      if (!(t_hi > t_lo)) continue;
      beta_ += (t_lo + unit(rng) * (t_hi - t_lo)) * dir;
      beta_ = beta_.cwiseMax(-1.0).cwiseMin(1.0);
    }
  }
  return set_.center() + set_.generators() * beta_;
}

}  // namespace zest
