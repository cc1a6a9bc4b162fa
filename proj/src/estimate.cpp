#include "zest/estimate.hpp"

#include "zest/errors.hpp"
#include "zest/learn.hpp"

#include <chrono>
#include <stdexcept>

namespace zest {

void SensorModel::validate(Eigen::Index state_dim) const {
  if (obs_matrix.cols() != state_dim) throw std::invalid_argument("SensorModel: C columns != state dimension");
  if (noise.dim() != obs_matrix.rows()) throw std::invalid_argument("SensorModel: noise dimension != C rows");
}

void EstimatorConfig::validate() const {
  if (!(reduction_order >= 1.0)) throw std::invalid_argument("EstimatorConfig: reduction order must be >= 1");
  if (constraint_budget < 0) throw std::invalid_argument("EstimatorConfig: constraint budget must be >= 0");
  if (!(containment_tol >= 0.0)) throw std::invalid_argument("EstimatorConfig: containment tolerance must be >= 0");
}

IntervalVector hull_of(const StateSet& s) {
  if (const auto* z = std::get_if<Zonotope>(&s)) return interval_hull(*z);
  return cz_interval_hull(std::get<ConstrainedZonotope>(s));
}

double radius_of(const StateSet& s) {
  if (const auto* z = std::get_if<Zonotope>(&s)) return radius(*z);
  return 0.5 * hull_of(s).width().norm();
}

bool set_contains(const StateSet& s, const VectorXd& x, double tol) {
  if (const auto* z = std::get_if<Zonotope>(&s)) return contains_point(*z, x, tol);
  return cz_contains_point(std::get<ConstrainedZonotope>(s), x, tol);
}

Eigen::Index dim_of(const StateSet& s) {
  return std::visit([](const auto& z) { return z.dim(); }, s);
}

namespace {

void check_model_shapes(const IntervalMatrix& model, Eigen::Index n, const Zonotope& input,
                        const Zonotope& process_noise) {
  if (model.rows() != n || model.cols() != n + input.dim() || process_noise.dim() != n) {
    throw std::invalid_argument("time_update: dimension mismatch");
  }
}

// Stacked C and block-diagonal noise generators.
struct StackedSensors {
  MatrixXd obs;
  MatrixXd noise_gens;
  VectorXd noise_center;
};

StackedSensors stack(std::span<const SensorModel> sensors, Eigen::Index n) {
  Eigen::Index p = 0;
  Eigen::Index g = 0;
  for (const auto& s : sensors) {
    s.validate(n);
    p += s.outputs();
    g += s.noise.num_generators();
  }
  StackedSensors out{MatrixXd(p, n), MatrixXd::Zero(p, g), VectorXd(p)};
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  for (const auto& s : sensors) {
    out.obs.middleRows(row, s.outputs()) = s.obs_matrix;
    out.noise_gens.block(row, col, s.outputs(), s.noise.num_generators()) = s.noise.generators();
    out.noise_center.segment(row, s.outputs()) = s.noise.center();
    row += s.outputs();
    col += s.noise.num_generators();
  }
  return out;
}

std::vector<SensorModel> sensors_of(std::span<const Measurement> ms) {
  std::vector<SensorModel> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.sensor);
  return out;
}

// c_hat = c + sum lambda_i (y_i - C_i c - c_vi)
VectorXd weighted_center(const VectorXd& c, std::span<const Measurement> ms, std::span<const MatrixXd> lambdas) {
  VectorXd out = c;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& m = ms[i];
    if (m.y.size() != m.sensor.outputs()) throw std::invalid_argument("measurement length != sensor outputs");
    out += lambdas[i] * (m.y - m.sensor.obs_matrix * c - m.sensor.noise.center());
  }
  return out;
}

std::vector<MatrixXd> resolve_lambdas(const MatrixXd& gt, std::span<const Measurement> ms,
                                      std::optional<std::vector<MatrixXd>> lambdas) {
  const std::vector<SensorModel> sensors = sensors_of(ms);
  if (!lambdas) return solve_lambda(gt, sensors);
  if (lambdas->size() != ms.size()) throw std::invalid_argument("implicit_update: one weight matrix per sensor");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if ((*lambdas)[i].rows() != gt.rows() || (*lambdas)[i].cols() != ms[i].sensor.outputs()) {
      throw std::invalid_argument("implicit_update: weight matrix shape mismatch");
    }
  }
  return std::move(*lambdas);
}

void require_measurements(std::span<const Measurement> ms, Eigen::Index n) {
  if (ms.empty()) throw std::invalid_argument("measurement update needs at least one measurement");
  for (const auto& m : ms) {
    m.sensor.validate(n);
    if (m.y.size() != m.sensor.outputs()) throw std::invalid_argument("measurement length != sensor outputs");
  }
}

}  // namespace

Zonotope time_update(const IntervalMatrix& model, const Zonotope& state, const Zonotope& input,
                     const Zonotope& process_noise) {
  check_model_shapes(model, state.dim(), input, process_noise);
  return minkowski_sum(interval_times_zonotope(model, cartesian_product(state, input)), process_noise);
}

ConstrainedZonotope time_update(const IntervalMatrix& model, const ConstrainedZonotope& state, const Zonotope& input,
                                const Zonotope& process_noise) {
  check_model_shapes(model, state.dim(), input, process_noise);
  const IntervalVector state_hull = cz_interval_hull(state);
  const IntervalVector input_hull = interval_hull(input);
  VectorXd extent(state.dim() + input.dim());
  extent << state_hull.lower.cwiseAbs().cwiseMax(state_hull.upper.cwiseAbs()),
      input_hull.lower.cwiseAbs().cwiseMax(input_hull.upper.cwiseAbs());
  const VectorXd d = model.radius() * extent;

  ConstrainedZonotope mapped = cz_linear_map(model.center(), cz_cartesian_product(state, input));
  mapped = cz_minkowski_sum(mapped, Zonotope(VectorXd::Zero(state.dim()), MatrixXd(d.asDiagonal())));
  return cz_minkowski_sum(mapped, process_noise);
}

StateSet time_update(const LearnedModelSet& model, const StateSet& state, const Zonotope& input) {
  return std::visit([&](const auto& s) -> StateSet { return time_update(model.m_sigma, s, input, model.process_noise); },
                    state);
}

Zonotope measurement_zonotope(const VectorXd& y, const SensorModel& sensor, double nullspace_bound) {
  if (y.size() != sensor.outputs()) throw std::invalid_argument("measurement_zonotope: measurement length mismatch");
  if (sensor.noise.dim() != sensor.outputs()) throw std::invalid_argument("measurement_zonotope: noise dim mismatch");
  const ObservationSvd svd = decompose_observation(sensor.obs_matrix);
  const VectorXd c = svd.left_inverse * (y - sensor.noise.center());
  MatrixXd g(sensor.obs_matrix.cols(), sensor.noise.num_generators() + svd.null_basis.cols());
  g << svd.left_inverse * sensor.noise.generators(), nullspace_bound * svd.null_basis;
  return Zonotope(c, std::move(g));
}

Zonotope measurement_zonotope(const VectorXd& y, const SensorModel& sensor, const Zonotope& predicted) {
  sensor.validate(predicted.dim());
  const ObservationSvd svd = decompose_observation(sensor.obs_matrix);
  const double bound = radius(predicted) + (svd.null_basis.transpose() * predicted.center()).norm();
  return measurement_zonotope(y, sensor, bound);
}

Zonotope update_approach1(const Zonotope& predicted, std::span<const Measurement> measurements) {
  require_measurements(measurements, predicted.dim());
  Zonotope out = predicted;
  for (const auto& m : measurements) out = intersect_over_approx(out, measurement_zonotope(m.y, m.sensor, predicted));
  return out;
}

ConstrainedZonotope update_approach1(const ConstrainedZonotope& predicted, std::span<const Measurement> measurements) {
  require_measurements(measurements, predicted.dim());
  const Zonotope outer = predicted.unconstrained();
  ConstrainedZonotope out = predicted;
  for (const auto& m : measurements) {
    out = cz_intersect(out, cz_from_zonotope(measurement_zonotope(m.y, m.sensor, outer)));
  }
  if (cz_is_empty(out)) {
    throw InconsistentMeasurementError("measurement update produced an empty set; noise bounds are violated");
  }
  return out;
}

std::vector<MatrixXd> solve_lambda(const MatrixXd& gt, std::span<const SensorModel> sensors) {
  if (sensors.empty()) throw std::invalid_argument("solve_lambda: no sensors");
  const Eigen::Index n = gt.rows();
  const StackedSensors st = stack(sensors, n);
  const MatrixXd p = gt * gt.transpose();
  MatrixXd s = st.obs * p * st.obs.transpose() + st.noise_gens * st.noise_gens.transpose();
  const MatrixXd rhs = st.obs * p;

  Eigen::LDLT<MatrixXd> ldlt(s);
  const double scale = std::max(1.0, s.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-14) {
    s.diagonal().array() += 1e-12 * scale;
    ldlt.compute(s);
  }
  const MatrixXd lambda = ldlt.solve(rhs).transpose();  // n x p

  std::vector<MatrixXd> out;
  out.reserve(sensors.size());
  Eigen::Index col = 0;
  for (const auto& sensor : sensors) {
    out.push_back(lambda.middleCols(col, sensor.outputs()));
    col += sensor.outputs();
  }
  return out;
}

MatrixXd weighted_generators(const MatrixXd& gt, std::span<const SensorModel> sensors,
                             std::span<const MatrixXd> lambdas) {
  const Eigen::Index n = gt.rows();
  if (lambdas.size() != sensors.size()) throw std::invalid_argument("weighted_generators: one weight per sensor");
  MatrixXd gain = MatrixXd::Identity(n, n);
  Eigen::Index cols = gt.cols();
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    gain -= lambdas[i] * sensors[i].obs_matrix;
    cols += sensors[i].noise.num_generators();
  }
  MatrixXd g(n, cols);
  g.leftCols(gt.cols()) = gain * gt;
  Eigen::Index col = gt.cols();
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Eigen::Index k = sensors[i].noise.num_generators();
    g.middleCols(col, k) = -lambdas[i] * sensors[i].noise.generators();
    col += k;
  }
  return g;
}

Zonotope implicit_update(const Zonotope& predicted, std::span<const Measurement> measurements,
                         std::optional<std::vector<MatrixXd>> lambdas) {
  require_measurements(measurements, predicted.dim());
  const std::vector<MatrixXd> w = resolve_lambdas(predicted.generators(), measurements, std::move(lambdas));
  const std::vector<SensorModel> sensors = sensors_of(measurements);
  return Zonotope(weighted_center(predicted.center(), measurements, w),
                  weighted_generators(predicted.generators(), sensors, w));
}

ConstrainedZonotope implicit_update(const ConstrainedZonotope& predicted, std::span<const Measurement> measurements,
                                    std::optional<std::vector<MatrixXd>> lambdas) {
  require_measurements(measurements, predicted.dim());
  const MatrixXd& gt = predicted.generators();
  const std::vector<MatrixXd> w = resolve_lambdas(gt, measurements, std::move(lambdas));
  const std::vector<SensorModel> sensors = sensors_of(measurements);
  const StackedSensors st = stack(sensors, predicted.dim());

  const Eigen::Index ng = gt.cols();
  const Eigen::Index nv = st.noise_gens.cols();
  const Eigen::Index nc = predicted.num_constraints();
  const Eigen::Index p = st.obs.rows();

  MatrixXd con = MatrixXd::Zero(nc + p, ng + nv);
  con.topLeftCorner(nc, ng) = predicted.con_matrix();
  con.bottomLeftCorner(p, ng) = st.obs * gt;
  con.bottomRightCorner(p, nv) = st.noise_gens;

  VectorXd y(p);
  Eigen::Index row = 0;
  for (const auto& m : measurements) {
    y.segment(row, m.y.size()) = m.y;
    row += m.y.size();
  }
  VectorXd rhs(nc + p);
  rhs << predicted.con_rhs(), y - st.obs * predicted.center() - st.noise_center;

  return ConstrainedZonotope(weighted_center(predicted.center(), measurements, w),
                             weighted_generators(gt, sensors, w), std::move(con), std::move(rhs));
}

ConstrainedZonotope update_approach2(const ConstrainedZonotope& p, std::span<const Measurement> ms) {
  ConstrainedZonotope out = implicit_update(p, ms);
  if (cz_is_empty(out)) {
    throw InconsistentMeasurementError("measurement update produced an empty set; noise bounds are violated");
  }
  return out;
}

StateSet measurement_update(const StateSet& predicted, std::span<const Measurement> measurements,
                            UpdateApproach approach) {
  return std::visit(
      [&](const auto& s) -> StateSet {
        return approach == UpdateApproach::kReverseMapping ? StateSet(update_approach1(s, measurements))
                                                           : StateSet(update_approach2(s, measurements));
      },
      predicted);
}

StateSet reduce(const StateSet& s, const EstimatorConfig& cfg) {
  if (const auto* z = std::get_if<Zonotope>(&s)) return reduce_order(*z, cfg.reduction_order);
  return cz_reduce(std::get<ConstrainedZonotope>(s), cfg.reduction_order, cfg.constraint_budget);
}

std::vector<StepResult> run_estimator(const LearnedModelSet& model, std::span<const SensorModel> sensors,
                                      std::span<const Zonotope> inputs,
                                      std::span<const std::vector<VectorXd>> measurements, const Zonotope& initial_set,
                                      const EstimatorConfig& cfg) {
  cfg.validate();
  if (inputs.size() != measurements.size()) {
    throw std::invalid_argument("run_estimator: need one input and one measurement set per step");
  }
  if (initial_set.dim() != model.state_dim()) throw std::invalid_argument("run_estimator: X0 dimension mismatch");
  for (const auto& s : sensors) s.validate(model.state_dim());

  StateSet current = cfg.representation == Representation::kZonotope ? StateSet(initial_set)
                                                                      : StateSet(cz_from_zonotope(initial_set));
  std::vector<StepResult> results;
  results.reserve(inputs.size());
  std::vector<Measurement> ms;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (measurements[k].size() != sensors.size()) {
      throw std::invalid_argument("run_estimator: one reading per sensor per step");
    }
    ms.clear();
    for (std::size_t i = 0; i < sensors.size(); ++i) ms.push_back({measurements[k][i], sensors[i]});

    StepResult r;
    r.k = static_cast<int>(k + 1);
    const auto start = std::chrono::steady_clock::now();
    try {
      r.time_updated = time_update(model, current, inputs[k]);
      r.measurement_updated = measurement_update(r.time_updated, ms, cfg.approach);
      current = reduce(r.measurement_updated, cfg);
    } catch (const InconsistentMeasurementError& e) {
      throw InconsistentMeasurementError(std::string(e.what()) + " (step " + std::to_string(k + 1) + ")",
                                         static_cast<int>(k + 1));
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.hull = hull_of(r.measurement_updated);
    r.radius = radius_of(r.measurement_updated);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace zest
