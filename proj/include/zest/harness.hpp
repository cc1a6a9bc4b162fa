#pragma once

#include "zest/baseline.hpp"
#include "zest/estimate.hpp"
#include "zest/learn.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace zest {

struct SensorSpec {
  MatrixXd obs_matrix;
  Zonotope noise;           // online measurement noise v
  Zonotope training_noise;  // offline output noise gamma
};

/// Estimator variant: representation x measurement-update approach.
enum class Variant { kZono1, kZono2, kConZono1, kConZono2 };

inline constexpr Variant kAllVariants[] = {Variant::kZono1, Variant::kZono2, Variant::kConZono1, Variant::kConZono2};

std::string variant_name(Variant v);  // z1, z2, cz1, cz2
Variant parse_variant(const std::string& name);
/// base with the representation and approach of v.
EstimatorConfig variant_config(Variant v, const EstimatorConfig& base);

struct ScenarioConfig {
  MatrixXd a_true;
  MatrixXd b_true;
  std::vector<SensorSpec> sensors;
  Zonotope process_noise;
  int training_length = 500;
  int horizon = 20;
  Zonotope initial_set;
  VectorXd x0_true;
  Zonotope input_set;
  double state_bound = 50.0;
  std::uint64_t seed = 1;
  std::array<EstimatorConfig, 4> estimators;  // indexed by Variant

  const EstimatorConfig& estimator(Variant v) const { return estimators[static_cast<std::size_t>(v)]; }

  Eigen::Index state_dim() const { return a_true.rows(); }
  Eigen::Index input_dim() const { return b_true.cols(); }
  std::vector<SensorModel> sensor_models() const;
  /// Stacked C and combined training-noise zonotope of all sensors.
  MatrixXd stacked_obs_matrix() const;
  Zonotope stacked_training_noise() const;

  /// Throws ConfigError.
  void validate() const;

  /// Rotating target with three sensors, uniform inputs in <0, 10>.
  static ScenarioConfig rotating_target();
};

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
/// Missing keys fall back to rotating_target(); throws ConfigError.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

struct OnlineTruth {
  std::vector<VectorXd> states;                     // x(0..K)
  std::vector<VectorXd> inputs;                     // u(0..K-1)
  std::vector<std::vector<VectorXd>> measurements;  // [k-1][sensor] = y^i(k), k = 1..K
};

struct NoiseLog {
  std::vector<VectorXd> process;       // every w drawn (training then online)
  std::vector<VectorXd> training;      // gamma(0..T), stacked
  std::vector<std::vector<VectorXd>> measurement;  // [k-1][sensor]
};

struct GeneratedData {
  TrainingData training;
  std::vector<VectorXd> training_states;  // x(0..T)
  OnlineTruth online;
  NoiseLog noise;
  double max_state_norm = 0.0;
};

/// Simulates the true system; training and online segments draw from
/// independent streams derived from cfg.seed.
GeneratedData generate_data(const ScenarioConfig& cfg);

struct StepRecord {
  int k = 0;
  VectorXd lower;
  VectorXd upper;
  double radius = 0.0;
  VectorXd truth;
  bool contained = false;
  double step_ms = 0.0;
};

struct VariantReport {
  Variant variant = Variant::kZono1;
  std::vector<StepRecord> steps;
  double containment_rate = 0.0;
  double mean_radius = 0.0;
  double mean_width = 0.0;  // mean over steps and dimensions of hull width
  double mean_step_ms = 0.0;
};

struct BaselineRecord {
  int k = 0;
  VectorXd mean;
  VectorXd sigma3_axes;
  double angle_rad = 0.0;
};

struct RunReport {
  std::uint64_t seed = 0;
  double model_max_radius = 0.0;
  bool model_contains_truth = false;
  bool state_bound_respected = true;
  double max_state_norm = 0.0;
  std::vector<VariantReport> variants;
  std::vector<BaselineRecord> baseline;
  std::string baseline_error;
  std::vector<std::string> warnings;

  bool all_contained() const;
  const VariantReport& variant(Variant v) const;
};

/// learn -> estimate every requested variant -> KF baseline.
RunReport run_scenario(const ScenarioConfig& cfg, std::span<const Variant> variants = kAllVariants);

struct VariantAggregate {
  Variant variant = Variant::kZono1;
  std::size_t steps = 0;
  std::size_t contained = 0;
  double containment_rate = 0.0;
  double radius_p05 = 0.0;
  double radius_p50 = 0.0;
  double radius_p95 = 0.0;
  double mean_radius = 0.0;
  double mean_width = 0.0;
  double mean_step_ms = 0.0;
};

struct AggregateReport {
  std::uint64_t first_seed = 0;
  int runs = 0;
  int model_containment_count = 0;
  std::vector<VariantAggregate> variants;
  std::vector<RunReport> reports;  // ordered by seed
};

/// Runs seeds seed .. seed + n_runs - 1 on `threads` workers (0 = hardware
/// concurrency). Results do not depend on the thread count.
AggregateReport montecarlo(const ScenarioConfig& cfg, int n_runs, std::span<const Variant> variants = kAllVariants,
                           unsigned threads = 0);

void write_variant_csv(std::ostream& os, const VariantReport& r, bool include_timing = true);
void write_baseline_csv(std::ostream& os, const std::vector<BaselineRecord>& b);
nlohmann::json model_to_json(const LearnedModelSet& model);
nlohmann::json summary_json(const RunReport& r, bool include_timing = true);
nlohmann::json aggregate_json(const AggregateReport& a, bool include_timing = true);

}  // namespace zest
