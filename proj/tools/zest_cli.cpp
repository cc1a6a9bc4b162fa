// zest: learn a model set from simulated data and run set-based estimators.
#include "zest/errors.hpp"
#include "zest/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace zest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitLearning = 3;
constexpr int kExitContainment = 4;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string variant = "all";
  std::optional<int> steps;
  int runs = 50;
  unsigned threads = 0;
  bool no_timing = false;
  std::string data;
  std::string save_data;
};

ScenarioConfig scenario(const Options& o) {
  ScenarioConfig cfg = o.config.empty() ? ScenarioConfig::rotating_target() : load_scenario(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.steps) cfg.horizon = *o.steps;
  cfg.validate();
  return cfg;
}

std::vector<Variant> variants(const Options& o) {
  if (o.variant == "all") return {std::begin(kAllVariants), std::end(kAllVariants)};
  return {parse_variant(o.variant)};
}

fs::path out_dir(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path("results") : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

void write_run(const fs::path& dir, const ScenarioConfig& cfg, const RunReport& rep, bool timing, bool baseline) {
  write_json(dir / "config.json", scenario_to_json(cfg));
  for (const auto& v : rep.variants) {
    std::ofstream f(dir / (variant_name(v.variant) + ".csv"));
    write_variant_csv(f, v, timing);
  }
  if (baseline) {
    std::ofstream f(dir / "baseline.csv");
    write_baseline_csv(f, rep.baseline);
  }
  write_json(dir / "summary.json", summary_json(rep, timing));
}

void print_table(const RunReport& rep) {
  std::printf("%-8s %10s %12s %12s %10s\n", "variant", "contained", "mean_width", "mean_radius", "step_ms");
  for (const auto& v : rep.variants) {
    std::printf("%-8s %9.1f%% %12.5f %12.5f %10.3f\n", variant_name(v.variant).c_str(), 100.0 * v.containment_rate,
                v.mean_width, v.mean_radius, v.mean_step_ms);
  }
}

int cmd_learn(const Options& o) {
  const ScenarioConfig cfg = scenario(o);
  TrainingData training;
  if (o.data.empty()) {
    training = generate_data(cfg).training;
  } else {
    std::ifstream f(o.data);
    if (!f) throw ConfigError("cannot open training data '" + o.data + "'");
    training = read_training_csv(f, cfg.stacked_obs_matrix(), cfg.stacked_training_noise());
  }
  if (!o.save_data.empty()) {
    std::ofstream f(o.save_data);
    if (!f) throw std::runtime_error("cannot write " + o.save_data);
    write_training_csv(f, training);
  }
  const LearnedModelSet model = learn_model_set(training, cfg.process_noise, cfg.state_bound);
  nlohmann::json j = model_to_json(model);
  MatrixXd ab(cfg.state_dim(), cfg.state_dim() + cfg.input_dim());
  ab << cfg.a_true, cfg.b_true;
  j["contains_truth"] = model.m_sigma.contains(ab);
  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out_dir(o) / "model.json", j);
  }
  return kExitOk;
}

int cmd_estimate(const Options& o, bool compare) {
  const ScenarioConfig cfg = scenario(o);
  const std::vector<Variant> vs = compare ? std::vector<Variant>(std::begin(kAllVariants), std::end(kAllVariants))
                                          : variants(o);
  const RunReport rep = run_scenario(cfg, vs);
  const fs::path dir = out_dir(o);
  write_run(dir, cfg, rep, !o.no_timing, compare);
  print_table(rep);
  if (compare) {
    if (!rep.baseline_error.empty()) {
      std::printf("baseline   unavailable: %s\n", rep.baseline_error.c_str());
    } else {
      double a1 = 0.0, a2 = 0.0;
      for (const auto& b : rep.baseline) {
        a1 += b.sigma3_axes(0);
        a2 += b.sigma3_axes.size() > 1 ? b.sigma3_axes(1) : 0.0;
      }
      const double k = static_cast<double>(rep.baseline.size());
      std::printf("baseline   mean 3-sigma semi-axes %.5f %.5f\n", a1 / k, a2 / k);
    }
  }
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("results written to %s\n", dir.string().c_str());
  return rep.all_contained() ? kExitOk : kExitContainment;
}

int cmd_montecarlo(const Options& o) {
  const ScenarioConfig cfg = scenario(o);
  const std::vector<Variant> vs = variants(o);
  const AggregateReport agg = montecarlo(cfg, o.runs, vs, o.threads);
  const fs::path dir = out_dir(o);
  write_json(dir / "config.json", scenario_to_json(cfg));
  write_json(dir / "montecarlo.json", aggregate_json(agg, !o.no_timing));
  std::printf("%d runs from seed %llu; model contains truth in %d\n", agg.runs,
              static_cast<unsigned long long>(agg.first_seed), agg.model_containment_count);
  std::printf("%-8s %10s %10s %10s %10s %10s\n", "variant", "contained", "r_p05", "r_p50", "r_p95", "step_ms");
  bool ok = true;
  for (const auto& v : agg.variants) {
    std::printf("%-8s %9.2f%% %10.5f %10.5f %10.5f %10.3f\n", variant_name(v.variant).c_str(),
                100.0 * v.containment_rate, v.radius_p05, v.radius_p50, v.radius_p95, v.mean_step_ms);
    ok = ok && v.contained == v.steps;
  }
  std::printf("results written to %s\n", dir.string().c_str());
  return ok ? kExitOk : kExitContainment;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-based state estimation with learned model sets"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON scenario file (default: built-in rotating target)");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--steps", o.steps, "Online estimation steps K")->check(CLI::PositiveNumber);
  };
  CLI::App* learn = app.add_subcommand("learn", "Learn the model set and print it as JSON");
  common(learn);
  learn->add_option("--data", o.data, "Training CSV (k,u1..um,z1..zp) instead of simulated data");
  learn->add_option("--save-data", o.save_data, "Write the training data used as CSV");
  CLI::App* estimate = app.add_subcommand("estimate", "Run the estimators and write CSV/JSON");
  common(estimate);
  estimate->add_option("--variant", o.variant, "z1, z2, cz1, cz2 or all")
      ->check(CLI::IsMember({"z1", "z2", "cz1", "cz2", "all"}));
  estimate->add_flag("--no-timing", o.no_timing, "Write 0 for step times (byte-reproducible output)");
  CLI::App* mc = app.add_subcommand("montecarlo", "Containment campaign over consecutive seeds");
  common(mc);
  mc->add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber);
  mc->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  mc->add_option("--variant", o.variant, "z1, z2, cz1, cz2 or all")
      ->check(CLI::IsMember({"z1", "z2", "cz1", "cz2", "all"}));
  mc->add_flag("--no-timing", o.no_timing, "Write 0 for step times");
  CLI::App* compare = app.add_subcommand("compare", "All four estimators and the Kalman filter side by side");
  common(compare);
  compare->add_flag("--no-timing", o.no_timing, "Write 0 for step times (byte-reproducible output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*learn) return cmd_learn(o);
    if (*estimate) return cmd_estimate(o, false);
    if (*mc) return cmd_montecarlo(o);
    if (*compare) return cmd_estimate(o, true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LearningError& e) {
    std::cerr << "learning failed: " << e.what() << '\n';
    return kExitLearning;
  } catch (const InconsistentMeasurementError& e) {
    std::cerr << "containment violated: " << e.what() << '\n';
    return kExitContainment;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
