#pragma once

#include <Eigen/Dense>

#include <random>

namespace zest {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Axis-aligned box [lower, upper].
struct IntervalVector {
  VectorXd lower;
  VectorXd upper;

  IntervalVector() = default;
  IntervalVector(VectorXd lo, VectorXd hi);

  Eigen::Index dim() const { return lower.size(); }
  VectorXd width() const { return upper - lower; }
  VectorXd midpoint() const { return 0.5 * (lower + upper); }
  bool contains(const IntervalVector& other, double tol = 0.0) const;
};

/// Zonotope <c, G> = { c + G b : |b|_inf <= 1 }.
///
/// Columns of the generator matrix are generators. A zonotope may have
/// zero generators (a single point); zero columns are kept as-is until
/// reduce_order() is applied.
class Zonotope {
 public:
  Zonotope() = default;
  Zonotope(VectorXd center, MatrixXd generators);
  explicit Zonotope(VectorXd point);

  static Zonotope box(const VectorXd& center, const VectorXd& half_widths);

  Eigen::Index dim() const { return center_.size(); }
  Eigen::Index num_generators() const { return generators_.cols(); }
  double order() const;

  const VectorXd& center() const { return center_; }
  const MatrixXd& generators() const { return generators_; }

 private:
  VectorXd center_;
  MatrixXd generators_;
};

Zonotope linear_map(const MatrixXd& map, const Zonotope& z);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);
Zonotope translate(const Zonotope& z, const VectorXd& offset);

/// Girard reduction to at most ceil(target_order * n) generators.
///
/// Generators are ranked by |g|_1 - |g|_inf (descending, stable on column
/// index); the top ones are kept and the rest are enclosed in an axis-aligned
/// box. Throws std::invalid_argument if target_order < 1.
Zonotope reduce_order(const Zonotope& z, double target_order);

/// Girard reduction of a bare generator matrix to at most max_generators
/// columns. Requires max_generators >= rows (the box needs one column per row).
MatrixXd girard_reduce(const MatrixXd& generators, Eigen::Index max_generators);

/// Generator count allowed by an order budget in dimension n.
Eigen::Index generator_budget(double target_order, Eigen::Index n);

/// Upper bound on the radius of the smallest ball centred at c: sum_i |g_i|_2.
double radius(const Zonotope& z);

IntervalVector interval_hull(const Zonotope& z);

inline constexpr double kDefaultContainmentTol = 1e-7;

/// Point membership via min |b|_inf s.t. G b = x - c (linear program).
///
/// The point is accepted when the minimal infinity norm is at most 1 + tol;
/// the equality residual is allowed the same relative slack.
bool contains_point(const Zonotope& z, const VectorXd& x, double tol = kDefaultContainmentTol);

/// Minimal |b|_inf over all b with c + G b = x, or +inf if x is outside the
/// affine hull of z.
double min_norm_coefficients(const Zonotope& z, const VectorXd& x);

/// Uniform factor sampling: c + G b with b ~ U[-1,1]^xi.
VectorXd sample_point(const Zonotope& z, std::mt19937_64& rng);

/// Sound over-approximation of a ∩ b.
///
/// b is treated as a measurement of the state with identity observation
/// matrix and noise generators G_b; the gain minimising the Frobenius norm of
/// the resulting generator matrix is used. No emptiness detection.
Zonotope intersect_over_approx(const Zonotope& a, const Zonotope& b);

}  // namespace zest
