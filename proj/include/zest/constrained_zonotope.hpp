#pragma once

#include "zest/zonotope.hpp"

#include <random>

namespace zest {

/// { c + G b : A b = b_con, |b|_inf <= 1 }.
class ConstrainedZonotope {
 public:
  ConstrainedZonotope() = default;
  ConstrainedZonotope(VectorXd center, MatrixXd generators, MatrixXd con_matrix, VectorXd con_rhs);
  explicit ConstrainedZonotope(const Zonotope& z);

  Eigen::Index dim() const { return center_.size(); }
  Eigen::Index num_generators() const { return generators_.cols(); }
  Eigen::Index num_constraints() const { return con_matrix_.rows(); }

  const VectorXd& center() const { return center_; }
  const MatrixXd& generators() const { return generators_; }
  const MatrixXd& con_matrix() const { return con_matrix_; }
  const VectorXd& con_rhs() const { return con_rhs_; }

  /// The zonotope obtained by dropping all constraints (a superset).
  Zonotope unconstrained() const { return Zonotope(center_, generators_); }

 private:
  VectorXd center_;
  MatrixXd generators_;
  MatrixXd con_matrix_;
  VectorXd con_rhs_;
};

ConstrainedZonotope cz_from_zonotope(const Zonotope& z);

/// Exact intersection <c1, [G1 0], [[A1 0]; [0 A2]; [G1 -G2]], [b1; b2; c2 - c1]>.
ConstrainedZonotope cz_intersect(const ConstrainedZonotope& a, const ConstrainedZonotope& b);

bool cz_contains_point(const ConstrainedZonotope& z, const VectorXd& x, double tol = kDefaultContainmentTol);

bool cz_is_empty(const ConstrainedZonotope& z);

/// Tight box via 2n linear programs. Throws std::domain_error for an empty set.
IntervalVector cz_interval_hull(const ConstrainedZonotope& z);

/// Largest |w' x| over the set; the set must be nonempty.
double cz_support_abs(const ConstrainedZonotope& z, const VectorXd& direction);

ConstrainedZonotope cz_linear_map(const MatrixXd& map, const ConstrainedZonotope& z);

/// Adds unconstrained generators (Minkowski sum with a zonotope).
ConstrainedZonotope cz_minkowski_sum(const ConstrainedZonotope& a, const Zonotope& b);

ConstrainedZonotope cz_cartesian_product(const ConstrainedZonotope& a, const Zonotope& b);

/// Outer reduction to at most ceil(target_order * n) generators and
/// target_constraints constraints.
///
/// Constraints are removed one at a time by solving a row for its largest
/// coefficient and substituting (the eliminated factor's box bound is dropped,
/// which can only enlarge the set). At each round the candidate whose result has
/// the smallest interval-hull volume is taken. Remaining generators are reduced
/// by Girard's method on the lifted zonotope <[c; -b], [G; A]>.
ConstrainedZonotope cz_reduce(const ConstrainedZonotope& z, double target_order, Eigen::Index target_constraints);

/// Samples c + G b for b drawn uniformly from the feasible factor set
/// { A b = b_con, |b| <= 1 } by hit-and-run from an LP-feasible start.
/// Returns false when the set is empty.
class ConstrainedSampler {
 public:
  explicit ConstrainedSampler(const ConstrainedZonotope& z);
  bool empty() const { return empty_; }
  VectorXd sample(std::mt19937_64& rng);

 private:
  ConstrainedZonotope set_;
  MatrixXd null_basis_;
  VectorXd beta_;
  bool empty_ = false;
};

}  // namespace zest
