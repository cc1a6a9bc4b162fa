#pragma once

#include "zest/zonotope.hpp"

#include <random>
#include <vector>

namespace zest {

/// Matrix zonotope <C, G^(1..xi)> = { C + sum_i b_i G^(i) : |b_i| <= 1 }.
class MatrixZonotope {
 public:
  MatrixZonotope() = default;
  MatrixZonotope(MatrixXd center, std::vector<MatrixXd> generators);

  Eigen::Index rows() const { return center_.rows(); }
  Eigen::Index cols() const { return center_.cols(); }
  std::size_t num_generators() const { return generators_.size(); }

  const MatrixXd& center() const { return center_; }
  const std::vector<MatrixXd>& generators() const { return generators_; }

  /// sum_i |G^(i)| elementwise.
  MatrixXd abs_generator_sum() const;

 private:
  MatrixXd center_;
  std::vector<MatrixXd> generators_;
};

/// Elementwise box of matrices [lower, upper].
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(MatrixXd lower, MatrixXd upper);

  static IntervalMatrix point(const MatrixXd& m) { return IntervalMatrix(m, m); }
  static IntervalMatrix from_center_radius(const MatrixXd& center, const MatrixXd& radius);

  Eigen::Index rows() const { return lower_.rows(); }
  Eigen::Index cols() const { return lower_.cols(); }
  const MatrixXd& lower() const { return lower_; }
  const MatrixXd& upper() const { return upper_; }
  MatrixXd center() const { return 0.5 * (lower_ + upper_); }
  MatrixXd radius() const { return 0.5 * (upper_ - lower_); }

  bool contains(const MatrixXd& m, double tol = 0.0) const;
  IntervalMatrix transpose() const { return IntervalMatrix(lower_.transpose(), upper_.transpose()); }

 private:
  MatrixXd lower_;
  MatrixXd upper_;
};

/// Stack T copies of a noise zonotope column-wise: W = [w(0) ... w(T-1)].
///
/// Generator index j + i*T (0-based) places g^(i) in column j, matching the
/// usual placement ordering for concatenated noise sequences.
MatrixZonotope noise_matrix_zonotope(const Zonotope& noise, Eigen::Index horizon);

IntervalMatrix matzono_to_interval(const MatrixZonotope& m);

/// Enclosure of the Moore-Penrose pseudoinverse of every member of a
/// full-rank interval matrix.
///
/// For full row rank, A^+ = A'(AA')^{-1}; the Gram perturbation is bounded
/// by a Neumann series on |G^{-1}| |E| and the outer product is evaluated in
/// midpoint-radius arithmetic. Full column rank goes through the transpose.
/// Throws LearningError if the center is rank deficient or the interval is
/// too wide for the series to converge.
IntervalMatrix interval_pinv(const IntervalMatrix& m);

/// Exact interval product (endpoint min/max per scalar product).
IntervalMatrix interval_product(const IntervalMatrix& a, const IntervalMatrix& b);

IntervalMatrix matzono_times_interval(const MatrixZonotope& m, const IntervalMatrix& i);

/// <M_c c, [M_c G, diag(M_r (|c| + sum_i |g_i|))]> encloses { A x : A in I, x in Z }.
Zonotope interval_times_zonotope(const IntervalMatrix& m, const Zonotope& z);

/// Set difference in the Minkowski sense M1 + (-M2); generators concatenate.
MatrixZonotope matzono_subtract(const MatrixZonotope& a, const MatrixZonotope& b);

MatrixXd sample_member(const MatrixZonotope& m, std::mt19937_64& rng);
MatrixXd sample_member(const IntervalMatrix& m, std::mt19937_64& rng);

}  // namespace zest
