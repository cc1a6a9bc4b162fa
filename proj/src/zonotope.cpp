#include "zest/zonotope.hpp"

#include "zest/estimate.hpp"
#include "zest/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zest {

namespace {

void require_finite(const VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

void require_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

IntervalVector::IntervalVector(VectorXd lo, VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw std::invalid_argument("IntervalVector: size mismatch");
  require_finite(lower, "IntervalVector");
  require_finite(upper, "IntervalVector");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("IntervalVector: lower > upper");
}

bool IntervalVector::contains(const IntervalVector& other, double tol) const {
  if (other.dim() != dim()) return false;
  return (lower.array() <= other.lower.array() + tol).all() && (other.upper.array() <= upper.array() + tol).all();
}

Zonotope::Zonotope(VectorXd center, MatrixXd generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  if (generators_.rows() != center_.size()) {
    if (generators_.size() == 0) {
      generators_.resize(center_.size(), 0);
    } else {
      throw std::invalid_argument("Zonotope: generator rows must equal center length");
    }
  }
  require_finite(center_, "Zonotope center");
  require_finite(generators_, "Zonotope generators");
}

Zonotope::Zonotope(VectorXd point) : Zonotope(std::move(point), MatrixXd()) {}

Zonotope Zonotope::box(const VectorXd& center, const VectorXd& half_widths) {
  if (center.size() != half_widths.size()) throw std::invalid_argument("Zonotope::box: size mismatch");
  return Zonotope(center, half_widths.cwiseAbs().asDiagonal().toDenseMatrix());
}

double Zonotope::order() const {
  return dim() == 0 ? 0.0 : static_cast<double>(num_generators()) / static_cast<double>(dim());
}

Zonotope linear_map(const MatrixXd& map, const Zonotope& z) {
  if (map.cols() != z.dim()) throw std::invalid_argument("linear_map: dimension mismatch");
  return Zonotope(map * z.center(), map * z.generators());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  MatrixXd g(a.dim(), a.num_generators() + b.num_generators());
  g << a.generators(), b.generators();
  return Zonotope(a.center() + b.center(), std::move(g));
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b) {
  const Eigen::Index n = a.dim();
  const Eigen::Index m = b.dim();
  VectorXd c(n + m);
  c << a.center(), b.center();
  MatrixXd g = MatrixXd::Zero(n + m, a.num_generators() + b.num_generators());
  g.topLeftCorner(n, a.num_generators()) = a.generators();
  g.bottomRightCorner(m, b.num_generators()) = b.generators();
  return Zonotope(std::move(c), std::move(g));
}

Zonotope translate(const Zonotope& z, const VectorXd& offset) {
  if (offset.size() != z.dim()) throw std::invalid_argument("translate: dimension mismatch");
  return Zonotope(z.center() + offset, z.generators());
}

Eigen::Index generator_budget(double target_order, Eigen::Index n) {
  if (!(target_order >= 1.0)) throw std::invalid_argument("reduce_order: target order must be >= 1");
  return static_cast<Eigen::Index>(std::ceil(target_order * static_cast<double>(n) - 1e-9));
}

MatrixXd girard_reduce(const MatrixXd& generators, Eigen::Index max_generators) {
  const Eigen::Index n = generators.rows();
  const Eigen::Index count = generators.cols();
  if (count <= max_generators) return generators;
  if (max_generators < n) throw std::invalid_argument("girard_reduce: budget smaller than dimension");

  std::vector<double> score(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    score[i] = generators.col(i).lpNorm<1>() - generators.col(i).lpNorm<Eigen::Infinity>();
  }
  std::vector<Eigen::Index> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });

  const Eigen::Index keep = max_generators - n;
  MatrixXd out(n, max_generators);
  for (Eigen::Index k = 0; k < keep; ++k) out.col(k) = generators.col(idx[k]);
  VectorXd box = VectorXd::Zero(n);
  for (Eigen::Index k = keep; k < count; ++k) box += generators.col(idx[k]).cwiseAbs();
  out.rightCols(n) = box.asDiagonal().toDenseMatrix();
  return out;
}

Zonotope reduce_order(const Zonotope& z, double target_order) {
  const Eigen::Index budget = generator_budget(target_order, z.dim());
  return Zonotope(z.center(), girard_reduce(z.generators(), budget));
}

double radius(const Zonotope& z) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < z.num_generators(); ++i) r += z.generators().col(i).norm();
  return r;
}

IntervalVector interval_hull(const Zonotope& z) {
  const VectorXd delta = z.generators().cwiseAbs().rowwise().sum();
  return IntervalVector(z.center() - delta, z.center() + delta);
}

double min_norm_coefficients(const Zonotope& z, const VectorXd& x) {
  if (x.size() != z.dim()) throw std::invalid_argument("contains_point: dimension mismatch");
  const VectorXd d = x - z.center();
  const Eigen::Index xi = z.num_generators();
  if (xi == 0) return d.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>()) ? 0.0
                                                                     : std::numeric_limits<double>::infinity();

  // Full column rank: the solution of G b = d is unique.
  const Eigen::ColPivHouseholderQR<MatrixXd> qr(z.generators());
  if (qr.rank() == xi) {
    const VectorXd beta = qr.solve(d);
    const double residual = (z.generators() * beta - d).lpNorm<Eigen::Infinity>();
    if (residual > 1e-9 * (1.0 + d.lpNorm<Eigen::Infinity>() + radius(z))) {
      return std::numeric_limits<double>::infinity();
    }
    return beta.lpNorm<Eigen::Infinity>();
  }

  // variables [b; t], minimise t with -t <= b_i <= t.
  lp::Problem p(static_cast<int>(xi + 1));
  p.cost(xi) = 1.0;
  p.eq_matrix = MatrixXd::Zero(z.dim(), xi + 1);
  p.eq_matrix.leftCols(xi) = z.generators();
  p.eq_rhs = d;
  p.ub_matrix = MatrixXd::Zero(2 * xi, xi + 1);
  for (Eigen::Index i = 0; i < xi; ++i) {
    p.ub_matrix(2 * i, i) = 1.0;
    p.ub_matrix(2 * i, xi) = -1.0;
    p.ub_matrix(2 * i + 1, i) = -1.0;
    p.ub_matrix(2 * i + 1, xi) = -1.0;
  }
  p.ub_rhs = VectorXd::Zero(2 * xi);
  p.lower(xi) = 0.0;
  const lp::Solution s = lp::solve(p);
  if (s.status != lp::Status::kOptimal) return std::numeric_limits<double>::infinity();
  return s.objective;
}

bool contains_point(const Zonotope& z, const VectorXd& x, double tol) {
  if (tol < 0.0) throw std::invalid_argument("contains_point: negative tolerance");
  return min_norm_coefficients(z, x) <= 1.0 + tol;
}

VectorXd sample_point(const Zonotope& z, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VectorXd beta(z.num_generators());
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta(i) = unit(rng);
  return z.center() + z.generators() * beta;
}

Zonotope intersect_over_approx(const Zonotope& a, const Zonotope& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("intersect_over_approx: dimension mismatch");
  const SensorModel virtual_sensor{MatrixXd::Identity(a.dim(), a.dim()),
                                   Zonotope(VectorXd::Zero(a.dim()), b.generators())};
  const std::vector<Measurement> ms{Measurement{b.center(), virtual_sensor}};
  return implicit_update(a, ms);
}

}  // namespace zest
