#include "zest/matrix_set.hpp"

#include "zest/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace zest {

MatrixZonotope::MatrixZonotope(MatrixXd center, std::vector<MatrixXd> generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  if (!center_.allFinite()) throw std::invalid_argument("MatrixZonotope: non-finite center");
  for (const auto& g : generators_) {
    if (g.rows() != center_.rows() || g.cols() != center_.cols()) {
      throw std::invalid_argument("MatrixZonotope: generator shape differs from center");
    }
    if (!g.allFinite()) throw std::invalid_argument("MatrixZonotope: non-finite generator");
  }
}

MatrixXd MatrixZonotope::abs_generator_sum() const {
  MatrixXd acc = MatrixXd::Zero(rows(), cols());
  for (const auto& g : generators_) acc += g.cwiseAbs();
  return acc;
}

IntervalMatrix::IntervalMatrix(MatrixXd lower, MatrixXd upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.rows() != upper_.rows() || lower_.cols() != upper_.cols()) {
    throw std::invalid_argument("IntervalMatrix: shape mismatch");
  }
  if (!lower_.allFinite() || !upper_.allFinite()) throw std::invalid_argument("IntervalMatrix: non-finite bounds");
  if ((lower_.array() > upper_.array()).any()) throw std::invalid_argument("IntervalMatrix: lower > upper");
}

IntervalMatrix IntervalMatrix::from_center_radius(const MatrixXd& center, const MatrixXd& radius) {
  return IntervalMatrix(center - radius.cwiseAbs(), center + radius.cwiseAbs());
}

bool IntervalMatrix::contains(const MatrixXd& m, double tol) const {
  if (m.rows() != rows() || m.cols() != cols()) return false;
  return (lower_.array() - tol <= m.array()).all() && (m.array() <= upper_.array() + tol).all();
}

MatrixZonotope noise_matrix_zonotope(const Zonotope& noise, Eigen::Index horizon) {
  if (horizon < 1) throw std::invalid_argument("noise_matrix_zonotope: horizon must be >= 1");
  const Eigen::Index n = noise.dim();
  MatrixXd center = noise.center().replicate(1, horizon);
  std::vector<MatrixXd> gens;
  gens.reserve(static_cast<std::size_t>(noise.num_generators() * horizon));
  for (Eigen::Index i = 0; i < noise.num_generators(); ++i) {
    for (Eigen::Index j = 0; j < horizon; ++j) {
      MatrixXd g = MatrixXd::Zero(n, horizon);
      g.col(j) = noise.generators().col(i);
      gens.push_back(std::move(g));
    }
  }
  return MatrixZonotope(std::move(center), std::move(gens));
}

IntervalMatrix matzono_to_interval(const MatrixZonotope& m) {
  const MatrixXd r = m.abs_generator_sum();
  return IntervalMatrix(m.center() - r, m.center() + r);
}

namespace {

IntervalMatrix pinv_full_row_rank(const MatrixXd& c, const MatrixXd& r) {
  const MatrixXd gram = c * c.transpose();
  const Eigen::FullPivLU<MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw LearningError("interval_pinv: Gram matrix of the center is singular");
  const MatrixXd gram_inv = lu.inverse();
  const MatrixXd abs_c = c.cwiseAbs();
  const MatrixXd abs_gram_inv = gram_inv.cwiseAbs();

  // (C+D)(C+D)' = G + E with |E| <= Q.
  const MatrixXd q = abs_c * r.transpose() + r * abs_c.transpose() + r * r.transpose();
  const MatrixXd p = abs_gram_inv * q;
  const double contraction = p.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(contraction < 1.0)) {
    throw LearningError("interval_pinv: interval radius too large for a bounded pseudoinverse (contraction " +
                        std::to_string(contraction) + " >= 1); more or better-excited data are needed");
  }
  // |(G+E)^{-1} - G^{-1}| <= sum_{k>=1} P^k |G^{-1}| = (I - P)^{-1} P |G^{-1}|.
  const Eigen::Index n = p.rows();
  const MatrixXd inv_radius =
      (MatrixXd::Identity(n, n) - p).fullPivLu().solve(p * abs_gram_inv).cwiseMax(0.0);

  const MatrixXd center = c.transpose() * gram_inv;
  const MatrixXd radius = abs_c.transpose() * inv_radius + r.transpose() * abs_gram_inv + r.transpose() * inv_radius;
  return IntervalMatrix::from_center_radius(center, radius);
}

}  // namespace

IntervalMatrix interval_pinv(const IntervalMatrix& m) {
  const MatrixXd c = m.center();
  const MatrixXd r = m.radius();
  const Eigen::Index full = std::min(c.rows(), c.cols());
  Eigen::JacobiSVD<MatrixXd> svd(c);
  const VectorXd& s = svd.singularValues();
  if (full == 0 || s(0) == 0.0 || s(full - 1) <= 1e-10 * s(0)) {
    throw LearningError("interval_pinv: center matrix is rank deficient (insufficient excitation)");
  }
  if (c.rows() <= c.cols()) return pinv_full_row_rank(c, r);
  return pinv_full_row_rank(c.transpose(), r.transpose()).transpose();
}

IntervalMatrix interval_product(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("interval_product: shape mismatch");
  MatrixXd lo = MatrixXd::Zero(a.rows(), b.cols());
  MatrixXd hi = MatrixXd::Zero(a.rows(), b.cols());
  const MatrixXd& al = a.lower();
  const MatrixXd& au = a.upper();
  const MatrixXd& bl = b.lower();
  const MatrixXd& bu = b.upper();
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const double b0 = bl(k, j);
      const double b1 = bu(k, j);
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double p00 = al(i, k) * b0;
        const double p01 = al(i, k) * b1;
        const double p10 = au(i, k) * b0;
        const double p11 = au(i, k) * b1;
        lo(i, j) += std::min(std::min(p00, p01), std::min(p10, p11));
        hi(i, j) += std::max(std::max(p00, p01), std::max(p10, p11));
      }
    }
  }
  return IntervalMatrix(std::move(lo), std::move(hi));
}

IntervalMatrix matzono_times_interval(const MatrixZonotope& m, const IntervalMatrix& i) {
  if (m.cols() != i.rows()) throw std::invalid_argument("matzono_times_interval: shape mismatch");
  return interval_product(matzono_to_interval(m), i);
}

Zonotope interval_times_zonotope(const IntervalMatrix& m, const Zonotope& z) {
  if (m.cols() != z.dim()) throw std::invalid_argument("interval_times_zonotope: shape mismatch");
  const MatrixXd mc = m.center();
  const MatrixXd mr = m.radius();
  const VectorXd extent = z.center().cwiseAbs() + z.generators().cwiseAbs().rowwise().sum();
  const VectorXd d = mr * extent;
  MatrixXd g(m.rows(), z.num_generators() + m.rows());
  g << mc * z.generators(), MatrixXd(d.asDiagonal());
  return Zonotope(mc * z.center(), std::move(g));
}

MatrixZonotope matzono_subtract(const MatrixZonotope& a, const MatrixZonotope& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matzono_subtract: shape mismatch");
  std::vector<MatrixXd> gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  return MatrixZonotope(a.center() - b.center(), std::move(gens));
}

MatrixXd sample_member(const MatrixZonotope& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  MatrixXd out = m.center();
  for (const auto& g : m.generators()) out += unit(rng) * g;
  return out;
}

MatrixXd sample_member(const IntervalMatrix& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out(i, j) = m.lower()(i, j) + unit(rng) * (m.upper()(i, j) - m.lower()(i, j));
    }
  }
  return out;
}

}  // namespace zest
