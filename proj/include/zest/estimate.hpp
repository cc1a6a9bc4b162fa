#pragma once

#include "zest/constrained_zonotope.hpp"
#include "zest/matrix_set.hpp"
#include "zest/zonotope.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace zest {

struct LearnedModelSet;

/// y = C x + v, v in noise.
struct SensorModel {
  MatrixXd obs_matrix;
  Zonotope noise;

  void validate(Eigen::Index state_dim) const;
  Eigen::Index outputs() const { return obs_matrix.rows(); }
};

struct Measurement {
  VectorXd y;
  SensorModel sensor;
};

enum class Representation { kZonotope, kConstrained };
enum class UpdateApproach { kReverseMapping, kImplicit };

struct EstimatorConfig {
  Representation representation = Representation::kZonotope;
  UpdateApproach approach = UpdateApproach::kImplicit;
  double reduction_order = 5.0;
  Eigen::Index constraint_budget = 5;
  double containment_tol = 1e-6;

  void validate() const;
};

using StateSet = std::variant<Zonotope, ConstrainedZonotope>;

IntervalVector hull_of(const StateSet& s);
/// Sum of generator norms for zonotopes; half the hull diagonal for
/// constrained zonotopes (whose generators alone overstate the extent).
double radius_of(const StateSet& s);
bool set_contains(const StateSet& s, const VectorXd& x, double tol);
Eigen::Index dim_of(const StateSet& s);

struct StepResult {
  int k = 0;
  StateSet time_updated;
  StateSet measurement_updated;
  IntervalVector hull;  // of measurement_updated
  double radius = 0.0;
  double wall_time_s = 0.0;
};

// ---- time update -------------------------------------------------------

/// M_Sigma (R x U) + Z_w for an interval model.
Zonotope time_update(const IntervalMatrix& model, const Zonotope& state, const Zonotope& input,
                     const Zonotope& process_noise);

/// Constrained variant: the model center maps the set (constraints kept);
/// the model radius contributes an axis-aligned box sized by the tight hull.
ConstrainedZonotope time_update(const IntervalMatrix& model, const ConstrainedZonotope& state, const Zonotope& input,
                                const Zonotope& process_noise);

StateSet time_update(const LearnedModelSet& model, const StateSet& state, const Zonotope& input);

// ---- approach 1: reverse mapping ---------------------------------------

/// All states consistent with one measurement, capped along ker(C) by
/// nullspace_bound.
Zonotope measurement_zonotope(const VectorXd& y, const SensorModel& sensor, double nullspace_bound);

/// Same, with the kernel bound radius(R) + |V2' c_R|_2 taken from the set
/// that the result will be intersected with.
Zonotope measurement_zonotope(const VectorXd& y, const SensorModel& sensor, const Zonotope& predicted);

Zonotope update_approach1(const Zonotope& predicted, std::span<const Measurement> measurements);

/// Exact; throws InconsistentMeasurementError on an empty result.
ConstrainedZonotope update_approach1(const ConstrainedZonotope& predicted, std::span<const Measurement> measurements);

// ---- approach 2: implicit intersection ---------------------------------

/// Weights minimising |G_hat|_F^2 for predicted generators `gt`:
/// lambda = P C' (C P C' + N)^{-1}, P = gt gt', N = blkdiag(G_v G_v').
std::vector<MatrixXd> solve_lambda(const MatrixXd& gt, std::span<const SensorModel> sensors);

/// G_hat = [(I - sum_i lambda_i C_i) gt, -lambda_1 G_v1, ..., -lambda_q G_vq].
MatrixXd weighted_generators(const MatrixXd& gt, std::span<const SensorModel> sensors,
                             std::span<const MatrixXd> lambdas);

/// Zonotope enclosing predicted ∩ measurement-consistent states. Weights
/// default to solve_lambda().
Zonotope implicit_update(const Zonotope& predicted, std::span<const Measurement> measurements,
                         std::optional<std::vector<MatrixXd>> lambdas = std::nullopt);

/// Exact intersection in constrained form (any weights give the same set).
ConstrainedZonotope implicit_update(const ConstrainedZonotope& predicted, std::span<const Measurement> measurements,
                                    std::optional<std::vector<MatrixXd>> lambdas = std::nullopt);

inline Zonotope update_approach2(const Zonotope& p, std::span<const Measurement> ms) { return implicit_update(p, ms); }
ConstrainedZonotope update_approach2(const ConstrainedZonotope& p, std::span<const Measurement> ms);

// ---- full loop -----------------------------------------------------------

StateSet measurement_update(const StateSet& predicted, std::span<const Measurement> measurements,
                            UpdateApproach approach);
StateSet reduce(const StateSet& s, const EstimatorConfig& cfg);

/// Runs k = 1..K: time update with inputs[k-1], measurement update with
/// measurements[k-1] (readings at time k), then order reduction of the
/// measurement-updated set, which seeds the next step.
std::vector<StepResult> run_estimator(const LearnedModelSet& model, std::span<const SensorModel> sensors,
                                      std::span<const Zonotope> inputs,
                                      std::span<const std::vector<VectorXd>> measurements, const Zonotope& initial_set,
                                      const EstimatorConfig& cfg);

}  // namespace zest
