#include "zest/learn.hpp"

#include "zest/errors.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace zest {

void TrainingData::validate() const {
  if (outputs.cols() != inputs.cols() + 1) {
    throw std::invalid_argument("TrainingData: need T+1 output columns for T input columns");
  }
  if (obs_matrix.rows() != outputs.rows()) throw std::invalid_argument("TrainingData: C rows != output rows");
  if (output_noise.dim() != outputs.rows()) throw std::invalid_argument("TrainingData: noise dim != output rows");
  if (!inputs.allFinite() || !outputs.allFinite() || !obs_matrix.allFinite()) {
    throw std::invalid_argument("TrainingData: non-finite data");
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

double parse_number(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (!blank(s.substr(used))) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("training csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

TrainingData read_training_csv(std::istream& in, const MatrixXd& obs_matrix, const Zonotope& output_noise) {
  const auto p = static_cast<std::size_t>(obs_matrix.rows());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("training csv: missing header row");
  const std::size_t cols = split_fields(line).size();
  if (cols < p + 2) throw ConfigError("training csv: need columns k, u1..um, z1..zp");
  const std::size_t m = cols - 1 - p;

  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto f = split_fields(line);
    if (f.size() != cols) throw ConfigError("training csv line " + std::to_string(line_no) + ": wrong field count");
    rows.push_back(std::move(f));
  }
  if (rows.size() < 2) throw ConfigError("training csv: need at least two rows");

  const auto horizon = static_cast<Eigen::Index>(rows.size() - 1);
  TrainingData data;
  data.inputs.resize(static_cast<Eigen::Index>(m), horizon);
  data.outputs.resize(static_cast<Eigen::Index>(p), horizon + 1);
  data.obs_matrix = obs_matrix;
  data.output_noise = output_noise;
  for (Eigen::Index k = 0; k <= horizon; ++k) {
    const auto& f = rows[static_cast<std::size_t>(k)];
    const int at = static_cast<int>(k) + 2;
    if (static_cast<Eigen::Index>(parse_number(f[0], at)) != k) {
      throw ConfigError("training csv line " + std::to_string(at) + ": rows must be k = 0, 1, ...");
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (k == horizon) continue;
      data.inputs(static_cast<Eigen::Index>(i), k) = parse_number(f[1 + i], at);
    }
    for (std::size_t i = 0; i < p; ++i) data.outputs(static_cast<Eigen::Index>(i), k) = parse_number(f[1 + m + i], at);
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("training csv: ") + e.what());
  }
  return data;
}

void write_training_csv(std::ostream& out, const TrainingData& data) {
  data.validate();
  const auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << 'k';
  for (Eigen::Index i = 1; i <= data.inputs.rows(); ++i) out << ",u" << i;
  for (Eigen::Index i = 1; i <= data.outputs.rows(); ++i) out << ",z" << i;
  out << '\n';
  for (Eigen::Index k = 0; k < data.outputs.cols(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
      out << ',';
      if (k < data.horizon()) out << num(data.inputs(i, k));
    }
    for (Eigen::Index i = 0; i < data.outputs.rows(); ++i) out << ',' << num(data.outputs(i, k));
    out << '\n';
  }
}

DataSequences split_sequences(const TrainingData& data) {
  data.validate();
  const Eigen::Index horizon = data.horizon();
  const Eigen::Index n = data.obs_matrix.cols();
  const Eigen::Index m = data.inputs.rows();
  if (horizon < n + m) {
    throw LearningError("split_sequences: " + std::to_string(horizon) + " samples cannot excite " +
                        std::to_string(n + m) + " regressors");
  }
  DataSequences seq;
  seq.z_plus = data.outputs.rightCols(horizon);
  seq.z_minus = data.outputs.leftCols(horizon);
  seq.u_minus = data.inputs;

  MatrixXd stacked(seq.z_minus.rows() + m, horizon);
  stacked << seq.z_minus, seq.u_minus;
  Eigen::JacobiSVD<MatrixXd> svd(stacked);
  const VectorXd& s = svd.singularValues();
  const Eigen::Index full = std::min(stacked.rows(), stacked.cols());
  if (s.size() == 0 || s(0) == 0.0 || s(full - 1) <= 1e-10 * s(0)) {
    seq.warnings.emplace_back("stacked [Z-; U-] is rank deficient; the data may not be persistently exciting");
  }
  return seq;
}

ObservationSvd decompose_observation(const MatrixXd& obs_matrix) {
  if (obs_matrix.size() == 0 || obs_matrix.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("observation matrix is zero");
  }
  if (!obs_matrix.allFinite()) throw std::invalid_argument("observation matrix has non-finite entries");
  const Eigen::Index n = obs_matrix.cols();
  Eigen::JacobiSVD<MatrixXd> svd(obs_matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > 1e-10 * s(0)) ++r;

  ObservationSvd out;
  out.rank = r;
  const MatrixXd v1 = svd.matrixV().leftCols(r);
  const MatrixXd p1 = svd.matrixU().leftCols(r);
  out.left_inverse = v1 * s.head(r).cwiseInverse().asDiagonal() * p1.transpose();
  out.null_basis = svd.matrixV().rightCols(n - r);
  return out;
}

MatrixZonotope reverse_map_outputs(const MatrixXd& outputs, const MatrixXd& obs_matrix, const Zonotope& output_noise,
                                   double state_bound) {
  if (!outputs.allFinite()) throw std::invalid_argument("reverse_map_outputs: non-finite data");
  if (outputs.rows() != obs_matrix.rows() || output_noise.dim() != obs_matrix.rows()) {
    throw std::invalid_argument("reverse_map_outputs: dimension mismatch");
  }
  if (!(state_bound > 0.0)) throw std::invalid_argument("reverse_map_outputs: state bound must be positive");
  const ObservationSvd svd = decompose_observation(obs_matrix);
  const Eigen::Index n = obs_matrix.cols();
  const Eigen::Index horizon = outputs.cols();

  MatrixXd center = svd.left_inverse * (outputs.colwise() - output_noise.center());
  const MatrixXd mapped_gens = svd.left_inverse * output_noise.generators();

  std::vector<MatrixXd> gens;
  gens.reserve(static_cast<std::size_t>((mapped_gens.cols() + svd.null_basis.cols()) * horizon));
  for (Eigen::Index i = 0; i < mapped_gens.cols(); ++i) {
    for (Eigen::Index j = 0; j < horizon; ++j) {
      MatrixXd g = MatrixXd::Zero(n, horizon);
      g.col(j) = mapped_gens.col(i);
      gens.push_back(std::move(g));
    }
  }
  // Each column gets its own kernel coefficients.
  for (Eigen::Index i = 0; i < svd.null_basis.cols(); ++i) {
    for (Eigen::Index j = 0; j < horizon; ++j) {
      MatrixXd g = MatrixXd::Zero(n, horizon);
      g.col(j) = state_bound * svd.null_basis.col(i);
      gens.push_back(std::move(g));
    }
  }
  return MatrixZonotope(std::move(center), std::move(gens));
}

LearnedModelSet learn_model_set(const TrainingData& data, const Zonotope& process_noise, double state_bound) {
  DataSequences seq = split_sequences(data);
  const Eigen::Index n = data.obs_matrix.cols();
  if (process_noise.dim() != n) throw std::invalid_argument("learn_model_set: process noise dimension != state dim");

  LearnedModelSet model;
  model.m_plus = reverse_map_outputs(seq.z_plus, data.obs_matrix, data.output_noise, state_bound);
  model.m_minus = reverse_map_outputs(seq.z_minus, data.obs_matrix, data.output_noise, state_bound);
  model.u_minus = seq.u_minus;
  model.state_bound = state_bound;
  model.process_noise = process_noise;
  model.warnings = std::move(seq.warnings);

  const IntervalMatrix x_minus = matzono_to_interval(model.m_minus);
  const Eigen::Index m = seq.u_minus.rows();
  const Eigen::Index horizon = seq.u_minus.cols();
  MatrixXd lo(n + m, horizon);
  MatrixXd hi(n + m, horizon);
  lo << x_minus.lower(), seq.u_minus;
  hi << x_minus.upper(), seq.u_minus;
  const IntervalMatrix regressor_pinv = interval_pinv(IntervalMatrix(std::move(lo), std::move(hi)));

  const MatrixZonotope shifted = matzono_subtract(model.m_plus, noise_matrix_zonotope(process_noise, horizon));
  model.m_sigma = matzono_times_interval(shifted, regressor_pinv);
  return model;
}

}  // namespace zest
