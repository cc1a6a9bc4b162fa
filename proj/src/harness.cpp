#include "zest/harness.hpp"

#include "zest/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace zest {

using nlohmann::json;

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kZono1: return "z1";
    case Variant::kZono2: return "z2";
    case Variant::kConZono1: return "cz1";
    case Variant::kConZono2: return "cz2";
  }
  throw std::invalid_argument("variant_name: bad variant");
}

Variant parse_variant(const std::string& name) {
  for (Variant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + name + "' (expected z1, z2, cz1 or cz2)");
}

EstimatorConfig variant_config(Variant v, const EstimatorConfig& base) {
  EstimatorConfig c = base;
  c.representation = (v == Variant::kZono1 || v == Variant::kZono2) ? Representation::kZonotope
                                                                     : Representation::kConstrained;
  c.approach = (v == Variant::kZono1 || v == Variant::kConZono1) ? UpdateApproach::kReverseMapping
                                                                 : UpdateApproach::kImplicit;
  return c;
}

// ---- scenario --------------------------------------------------------------

std::vector<SensorModel> ScenarioConfig::sensor_models() const {
  std::vector<SensorModel> out;
  out.reserve(sensors.size());
  for (const auto& s : sensors) out.push_back({s.obs_matrix, s.noise});
  return out;
}

MatrixXd ScenarioConfig::stacked_obs_matrix() const {
  Eigen::Index p = 0;
  for (const auto& s : sensors) p += s.obs_matrix.rows();
  MatrixXd c(p, state_dim());
  Eigen::Index row = 0;
  for (const auto& s : sensors) {
    c.middleRows(row, s.obs_matrix.rows()) = s.obs_matrix;
    row += s.obs_matrix.rows();
  }
  return c;
}

Zonotope ScenarioConfig::stacked_training_noise() const {
  if (sensors.empty()) return {};
  Zonotope z = sensors.front().training_noise;
  for (std::size_t i = 1; i < sensors.size(); ++i) z = cartesian_product(z, sensors[i].training_noise);
  return z;
}

namespace {

bool finite(const MatrixXd& m) { return m.allFinite(); }
bool finite(const Zonotope& z) { return z.center().allFinite() && z.generators().allFinite(); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid scenario: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  const Eigen::Index n = a_true.rows();
  require(n >= 1 && a_true.cols() == n, "A must be square and non-empty");
  require(b_true.rows() == n && b_true.cols() >= 1, "B must have n rows and at least one column");
  require(finite(a_true) && finite(b_true), "A and B must be finite");
  require(!sensors.empty(), "at least one sensor is required");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const auto& s = sensors[i];
    const std::string tag = "sensor " + std::to_string(i + 1);
    require(s.obs_matrix.rows() >= 1 && s.obs_matrix.cols() == n, tag + ": C must be p x n");
    require(s.noise.dim() == s.obs_matrix.rows(), tag + ": noise dimension must equal the row count of C");
    require(s.training_noise.dim() == s.obs_matrix.rows(),
            tag + ": training noise dimension must equal the row count of C");
    require(finite(s.obs_matrix) && finite(s.noise) && finite(s.training_noise), tag + ": values must be finite");
  }
  require(process_noise.dim() == n && finite(process_noise), "process noise must be an n-dimensional zonotope");
  require(training_length >= 1, "training length must be positive");
  require(horizon >= 1, "horizon must be positive");
  require(initial_set.dim() == n && finite(initial_set), "X0 must be an n-dimensional zonotope");
  require(x0_true.size() == n && x0_true.allFinite(), "x0 must have n entries");
  require(input_set.dim() == b_true.cols() && finite(input_set), "input set dimension must equal the column count of B");
  require(std::isfinite(state_bound) && state_bound > 0.0, "state bound must be positive");
  require(contains_point(initial_set, x0_true, 1e-9), "x0 must lie in X0");
  for (Variant v : kAllVariants) {
    try {
      estimator(v).validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("invalid scenario: estimator " + variant_name(v) + ": " + e.what());
    }
  }
}

ScenarioConfig ScenarioConfig::rotating_target() {
  ScenarioConfig c;
  c.a_true.resize(2, 2);
  c.a_true << 0.9455, -0.2426, 0.2486, 0.9455;
  c.b_true.resize(2, 1);
  c.b_true << 0.1, 0.0;

  const auto zero_centre = [](Eigen::Index p, const MatrixXd& g) { return Zonotope(VectorXd::Zero(p), g); };
  MatrixXd c1(1, 2), c2(1, 2), c3(2, 2);
  c1 << 1.0, 0.4;
  c2 << 0.9, -1.2;
  c3 << -0.8, 0.2, 0.0, 0.7;
  c.sensors = {
      {c1, zero_centre(1, MatrixXd::Identity(1, 1)), zero_centre(1, 0.02 * MatrixXd::Identity(1, 1))},
      {c2, zero_centre(1, MatrixXd::Identity(1, 1)), zero_centre(1, 0.02 * MatrixXd::Identity(1, 1))},
      {c3, zero_centre(2, MatrixXd::Identity(2, 2)), zero_centre(2, 0.02 * MatrixXd::Identity(2, 2))},
  };
  c.process_noise = zero_centre(2, 0.02 * MatrixXd::Identity(2, 2));
  c.training_length = 500;
  c.horizon = 20;
  c.initial_set = zero_centre(2, 15.0 * MatrixXd::Identity(2, 2));
  c.x0_true = VectorXd(2);
  c.x0_true << -10.0, 10.0;
  c.input_set = zero_centre(1, 10.0 * MatrixXd::Identity(1, 1));
  c.state_bound = 50.0;
  c.seed = 1;
  for (Variant v : kAllVariants) c.estimators[static_cast<std::size_t>(v)] = variant_config(v, EstimatorConfig{});
  return c;
}

// ---- JSON --------------------------------------------------------------------

namespace {

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json zonotope_json(const Zonotope& z) {
  json gens = json::array();
  for (Eigen::Index j = 0; j < z.num_generators(); ++j) gens.push_back(vector_json(z.generators().col(j)));
  return {{"center", vector_json(z.center())}, {"generators", gens}};
}

MatrixXd parse_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError(key + ": expected a non-empty list of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(key + ": rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

VectorXd parse_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key + ": expected a list of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Zonotope parse_zonotope(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains("center")) throw ConfigError(key + ": expected {center, generators}");
  const VectorXd c = parse_vector(j.at("center"), key + ".center");
  MatrixXd g(c.size(), 0);
  if (j.contains("generators")) {
    const json& gs = j.at("generators");
    if (!gs.is_array()) throw ConfigError(key + ".generators: expected a list of generator vectors");
    g.resize(c.size(), gs.size());
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const VectorXd col = parse_vector(gs[k], key + ".generators");
      if (col.size() != c.size()) throw ConfigError(key + ".generators: generator length must match center");
      g.col(k) = col;
    }
  }
  return {c, g};
}

json estimator_json(const EstimatorConfig& e) {
  return {{"reduction_order", e.reduction_order},
          {"constraint_budget", e.constraint_budget},
          {"containment_tol", e.containment_tol}};
}

EstimatorConfig parse_estimator(const json& j, EstimatorConfig base) {
  if (!j.is_object()) throw ConfigError("estimator settings must be an object");
  if (j.contains("reduction_order")) base.reduction_order = j.at("reduction_order").get<double>();
  if (j.contains("constraint_budget")) base.constraint_budget = j.at("constraint_budget").get<Eigen::Index>();
  if (j.contains("containment_tol")) base.containment_tol = j.at("containment_tol").get<double>();
  return base;
}

}  // namespace

json scenario_to_json(const ScenarioConfig& cfg) {
  json sensors = json::array();
  for (const auto& s : cfg.sensors) {
    sensors.push_back({{"C", matrix_json(s.obs_matrix)},
                       {"noise", zonotope_json(s.noise)},
                       {"training_noise", zonotope_json(s.training_noise)}});
  }
  json variants = json::object();
  for (Variant v : kAllVariants) variants[variant_name(v)] = estimator_json(cfg.estimator(v));
  return {{"A", matrix_json(cfg.a_true)},
          {"B", matrix_json(cfg.b_true)},
          {"sensors", sensors},
          {"process_noise", zonotope_json(cfg.process_noise)},
          {"training_length", cfg.training_length},
          {"horizon", cfg.horizon},
          {"initial_set", zonotope_json(cfg.initial_set)},
          {"x0", vector_json(cfg.x0_true)},
          {"input_set", zonotope_json(cfg.input_set)},
          {"state_bound", cfg.state_bound},
          {"seed", cfg.seed},
          {"variants", variants}};
}

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  static const std::set<std::string> known = {"A", "B", "sensors", "process_noise", "training_length", "horizon",
                                              "initial_set", "x0", "input_set", "state_bound", "seed", "estimator",
                                              "variants"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("scenario: unknown key '" + key + "'");
  }
  ScenarioConfig cfg = ScenarioConfig::rotating_target();
  try {
    if (j.contains("A")) cfg.a_true = parse_matrix(j.at("A"), "A");
    if (j.contains("B")) cfg.b_true = parse_matrix(j.at("B"), "B");
    if (j.contains("sensors")) {
      cfg.sensors.clear();
      for (const auto& s : j.at("sensors")) {
        SensorSpec spec;
        spec.obs_matrix = parse_matrix(s.at("C"), "sensors.C");
        spec.noise = parse_zonotope(s.at("noise"), "sensors.noise");
        spec.training_noise = s.contains("training_noise") ? parse_zonotope(s.at("training_noise"), "sensors.training_noise")
                                                           : Zonotope(VectorXd::Zero(spec.obs_matrix.rows()));
        cfg.sensors.push_back(std::move(spec));
      }
    }
    if (j.contains("process_noise")) cfg.process_noise = parse_zonotope(j.at("process_noise"), "process_noise");
    if (j.contains("training_length")) cfg.training_length = j.at("training_length").get<int>();
    if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<int>();
    if (j.contains("initial_set")) cfg.initial_set = parse_zonotope(j.at("initial_set"), "initial_set");
    if (j.contains("x0")) cfg.x0_true = parse_vector(j.at("x0"), "x0");
    if (j.contains("input_set")) cfg.input_set = parse_zonotope(j.at("input_set"), "input_set");
    if (j.contains("state_bound")) cfg.state_bound = j.at("state_bound").get<double>();
    if (!j.contains("seed")) throw ConfigError("scenario: 'seed' is required");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    EstimatorConfig base;
    if (j.contains("estimator")) base = parse_estimator(j.at("estimator"), base);
    for (Variant v : kAllVariants) {
      EstimatorConfig e = base;
      if (j.contains("variants") && j.at("variants").contains(variant_name(v))) {
        e = parse_estimator(j.at("variants").at(variant_name(v)), e);
      }
      cfg.estimators[static_cast<std::size_t>(v)] = variant_config(v, e);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

// ---- simulation ------------------------------------------------------------

namespace {

std::mt19937_64 sub_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kTrainingStream = 1;
constexpr std::uint32_t kOnlineStream = 2;

}  // namespace

GeneratedData generate_data(const ScenarioConfig& cfg) {
  cfg.validate();
  const Eigen::Index m = cfg.input_dim();
  const int t_len = cfg.training_length;
  const MatrixXd c_stack = cfg.stacked_obs_matrix();
  const Zonotope gamma = cfg.stacked_training_noise();

  GeneratedData out;
  out.training.obs_matrix = c_stack;
  out.training.output_noise = gamma;
  out.training.inputs.resize(m, t_len);
  out.training.outputs.resize(c_stack.rows(), t_len + 1);

  auto train_rng = sub_stream(cfg.seed, kTrainingStream);
  VectorXd x = sample_point(cfg.initial_set, train_rng);
  for (int k = 0; k <= t_len; ++k) {
    out.training_states.push_back(x);
    out.max_state_norm = std::max(out.max_state_norm, x.norm());
    const VectorXd g = sample_point(gamma, train_rng);
    out.noise.training.push_back(g);
    out.training.outputs.col(k) = c_stack * x + g;
    if (k == t_len) break;
    const VectorXd u = sample_point(cfg.input_set, train_rng);
    const VectorXd w = sample_point(cfg.process_noise, train_rng);
    out.noise.process.push_back(w);
    out.training.inputs.col(k) = u;
    x = cfg.a_true * x + cfg.b_true * u + w;
  }

  auto online_rng = sub_stream(cfg.seed, kOnlineStream);
  x = cfg.x0_true;
  out.online.states.push_back(x);
  out.max_state_norm = std::max(out.max_state_norm, x.norm());
  for (int k = 1; k <= cfg.horizon; ++k) {
    const VectorXd u = sample_point(cfg.input_set, online_rng);
    const VectorXd w = sample_point(cfg.process_noise, online_rng);
    out.noise.process.push_back(w);
    x = cfg.a_true * x + cfg.b_true * u + w;
    out.online.inputs.push_back(u);
    out.online.states.push_back(x);
    out.max_state_norm = std::max(out.max_state_norm, x.norm());

    std::vector<VectorXd> ys, vs;
    for (const auto& s : cfg.sensors) {
      const VectorXd v = sample_point(s.noise, online_rng);
      vs.push_back(v);
      ys.push_back(s.obs_matrix * x + v);
    }
    out.online.measurements.push_back(std::move(ys));
    out.noise.measurement.push_back(std::move(vs));
  }
  return out;
}

// ---- run ---------------------------------------------------------------------

bool RunReport::all_contained() const {
  for (const auto& v : variants) {
    for (const auto& s : v.steps) {
      if (!s.contained) return false;
    }
  }
  return true;
}

const VariantReport& RunReport::variant(Variant v) const {
  for (const auto& r : variants) {
    if (r.variant == v) return r;
  }
  throw std::out_of_range("RunReport: variant " + variant_name(v) + " was not run");
}

namespace {

MatrixXd block_diagonal(const std::vector<MatrixXd>& blocks) {
  Eigen::Index size = 0;
  for (const auto& b : blocks) size += b.rows();
  MatrixXd out = MatrixXd::Zero(size, size);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

VectorXd stack(const std::vector<VectorXd>& parts) {
  Eigen::Index size = 0;
  for (const auto& p : parts) size += p.size();
  VectorXd out(size);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

std::vector<BaselineRecord> run_baseline(const ScenarioConfig& cfg, const LearnedModelSet& model,
                                         const OnlineTruth& truth) {
  const PointModel point = identify_point_model(model);
  const MatrixXd q = uniform_covariance(cfg.process_noise);
  std::vector<MatrixXd> r_blocks;
  for (const auto& s : cfg.sensors) r_blocks.push_back(uniform_covariance(s.noise));
  const MatrixXd r = block_diagonal(r_blocks);
  const MatrixXd c = cfg.stacked_obs_matrix();

  KfState state{cfg.initial_set.center(), uniform_covariance(cfg.initial_set)};
  std::vector<BaselineRecord> out;
  for (int k = 1; k <= cfg.horizon; ++k) {
    state = kf_step(state, truth.inputs[k - 1], stack(truth.measurements[k - 1]), point, c, q, r);
    const SigmaEllipse e = three_sigma_ellipse(state);
    out.push_back({k, e.center, e.semi_axes, e.angle_rad});
  }
  return out;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, std::span<const Variant> variants) {
  const GeneratedData data = generate_data(cfg);
  RunReport rep;
  rep.seed = cfg.seed;
  rep.max_state_norm = data.max_state_norm;
  rep.state_bound_respected = data.max_state_norm <= cfg.state_bound;
  if (!rep.state_bound_respected) {
    rep.warnings.push_back("simulated state norm " + std::to_string(data.max_state_norm) + " exceeds the bound " +
                           std::to_string(cfg.state_bound));
  }

  const LearnedModelSet model = learn_model_set(data.training, cfg.process_noise, cfg.state_bound);
  for (const auto& w : model.warnings) rep.warnings.push_back(w);
  MatrixXd ab(cfg.state_dim(), cfg.state_dim() + cfg.input_dim());
  ab << cfg.a_true, cfg.b_true;
  rep.model_max_radius = model.m_sigma.radius().maxCoeff();
  rep.model_contains_truth = model.m_sigma.contains(ab, 0.0);

  const std::vector<SensorModel> sensors = cfg.sensor_models();
  std::vector<Zonotope> inputs;
  for (const auto& u : data.online.inputs) inputs.emplace_back(u);

  for (Variant v : variants) {
    const EstimatorConfig ecfg = cfg.estimator(v);
    std::vector<StepResult> steps;
    try {
      steps = run_estimator(model, sensors, inputs, data.online.measurements, cfg.initial_set, ecfg);
    } catch (const InconsistentMeasurementError& e) {
      throw InconsistentMeasurementError("variant " + variant_name(v) + ": " + e.what(), e.step());
    }
    VariantReport vr;
    vr.variant = v;
    double radius_sum = 0.0, width_sum = 0.0, ms_sum = 0.0;
    std::size_t contained = 0;
    for (const auto& s : steps) {
      StepRecord rec;
      rec.k = s.k;
      rec.lower = s.hull.lower;
      rec.upper = s.hull.upper;
      rec.radius = s.radius;
      rec.truth = data.online.states[s.k];
      rec.contained = set_contains(s.measurement_updated, rec.truth, ecfg.containment_tol);
      rec.step_ms = 1e3 * s.wall_time_s;
      contained += rec.contained ? 1 : 0;
      radius_sum += rec.radius;
      width_sum += s.hull.width().mean();
      ms_sum += rec.step_ms;
      vr.steps.push_back(std::move(rec));
    }
    const double count = static_cast<double>(std::max<std::size_t>(steps.size(), 1));
    vr.containment_rate = static_cast<double>(contained) / count;
    vr.mean_radius = radius_sum / count;
    vr.mean_width = width_sum / count;
    vr.mean_step_ms = ms_sum / count;
    rep.variants.push_back(std::move(vr));
  }

  try {
    rep.baseline = run_baseline(cfg, model, data.online);
  } catch (const std::exception& e) {
    rep.baseline.clear();
    rep.baseline_error = e.what();
  }
  return rep;
}

// ---- Monte Carlo -----------------------------------------------------------

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

AggregateReport montecarlo(const ScenarioConfig& cfg, int n_runs, std::span<const Variant> variants,
                           unsigned threads) {
  if (n_runs < 1) throw std::invalid_argument("montecarlo: n_runs must be at least 1");
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_runs));

  std::vector<RunReport> reports(n_runs);
  std::vector<std::exception_ptr> errors(n_runs);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
      try {
        ScenarioConfig c = cfg;
        c.seed = cfg.seed + static_cast<std::uint64_t>(i);
        reports[i] = run_scenario(c, variants);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AggregateReport agg;
  agg.first_seed = cfg.seed;
  agg.runs = n_runs;
  for (const auto& r : reports) agg.model_containment_count += r.model_contains_truth ? 1 : 0;
  for (Variant v : variants) {
    VariantAggregate va;
    va.variant = v;
    std::vector<double> radii;
    double width_sum = 0.0, ms_sum = 0.0;
    for (const auto& r : reports) {
      const VariantReport& vr = r.variant(v);
      for (const auto& s : vr.steps) {
        ++va.steps;
        va.contained += s.contained ? 1 : 0;
        radii.push_back(s.radius);
        width_sum += (s.upper - s.lower).mean();
        ms_sum += s.step_ms;
      }
    }
    const double count = static_cast<double>(std::max<std::size_t>(va.steps, 1));
    va.containment_rate = static_cast<double>(va.contained) / count;
    va.radius_p05 = quantile(radii, 0.05);
    va.radius_p50 = quantile(radii, 0.50);
    va.radius_p95 = quantile(radii, 0.95);
    double radius_sum = 0.0;
    for (double x : radii) radius_sum += x;
    va.mean_radius = radius_sum / count;
    va.mean_width = width_sum / count;
    va.mean_step_ms = ms_sum / count;
    agg.variants.push_back(va);
  }
  agg.reports = std::move(reports);
  return agg;
}

// ---- output ----------------------------------------------------------------

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_variant_csv(std::ostream& os, const VariantReport& r, bool include_timing) {
  const Eigen::Index n = r.steps.empty() ? 0 : r.steps.front().lower.size();
  os << "k";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i << "_lo,x" << i << "_hi";
  os << ",radius";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i << "_true";
  os << ",contained,step_ms\n";
  for (const auto& s : r.steps) {
    os << s.k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(s.lower(i)) << ',' << num(s.upper(i));
    os << ',' << num(s.radius);
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(s.truth(i));
    os << ',' << (s.contained ? 1 : 0) << ',' << (include_timing ? num(s.step_ms) : std::string("0")) << '\n';
  }
}

void write_baseline_csv(std::ostream& os, const std::vector<BaselineRecord>& b) {
  const Eigen::Index n = b.empty() ? 0 : b.front().mean.size();
  os << "k";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",mean" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",sigma3_axis" << i;
  os << ",angle_rad\n";
  for (const auto& r : b) {
    os << r.k;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(r.mean(i));
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << num(r.sigma3_axes(i));
    os << ',' << num(r.angle_rad) << '\n';
  }
}

json model_to_json(const LearnedModelSet& model) {
  json warnings = model.warnings;
  return {{"state_dim", model.state_dim()},
          {"input_dim", model.input_dim()},
          {"lower", matrix_json(model.m_sigma.lower())},
          {"upper", matrix_json(model.m_sigma.upper())},
          {"center", matrix_json(model.m_sigma.center())},
          {"radius", matrix_json(model.m_sigma.radius())},
          {"max_radius", model.m_sigma.radius().maxCoeff()},
          {"state_bound", model.state_bound},
          {"warnings", warnings}};
}

json summary_json(const RunReport& r, bool include_timing) {
  json variants = json::object();
  for (const auto& v : r.variants) {
    variants[variant_name(v.variant)] = {{"steps", v.steps.size()},
                                         {"containment_rate", v.containment_rate},
                                         {"mean_radius", v.mean_radius},
                                         {"mean_width", v.mean_width},
                                         {"mean_step_ms", include_timing ? v.mean_step_ms : 0.0}};
  }
  json baseline = {{"noise_covariance", "uniform second moment G G^T / 3"}, {"steps", r.baseline.size()}};
  if (!r.baseline_error.empty()) baseline["error"] = r.baseline_error;
  json warnings = r.warnings;
  return {{"seed", r.seed},
          {"model", {{"max_radius", r.model_max_radius}, {"contains_truth", r.model_contains_truth}}},
          {"state_bound", {{"respected", r.state_bound_respected}, {"max_state_norm", r.max_state_norm}}},
          {"all_contained", r.all_contained()},
          {"variants", variants},
          {"baseline", baseline},
          {"warnings", warnings}};
}

json aggregate_json(const AggregateReport& a, bool include_timing) {
  json variants = json::object();
  for (const auto& v : a.variants) {
    variants[variant_name(v.variant)] = {{"steps", v.steps},
                                         {"contained", v.contained},
                                         {"containment_rate", v.containment_rate},
                                         {"radius_p05", v.radius_p05},
                                         {"radius_p50", v.radius_p50},
                                         {"radius_p95", v.radius_p95},
                                         {"mean_radius", v.mean_radius},
                                         {"mean_width", v.mean_width},
                                         {"mean_step_ms", include_timing ? v.mean_step_ms : 0.0}};
  }
  json runs = json::array();
  for (const auto& r : a.reports) runs.push_back(summary_json(r, include_timing));
  return {{"first_seed", a.first_seed},
          {"runs", a.runs},
          {"model_containment_count", a.model_containment_count},
          {"variants", variants},
          {"per_run", runs}};
}

}  // namespace zest
