#pragma once

#include "zest/matrix_set.hpp"
#include "zest/zonotope.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace zest {

/// Offline experiment: u(0..T-1), z(0..T) with z(k) = C x(k) + gamma(k).
///
/// Multi-sensor data are stacked vertically: obs_matrix is the combined C
/// and output_noise the combined bound on gamma.
struct TrainingData {
  MatrixXd inputs;      // m x T
  MatrixXd outputs;     // p x (T+1)
  MatrixXd obs_matrix;  // p x n
  Zonotope output_noise;

  Eigen::Index horizon() const { return inputs.cols(); }
  void validate() const;
};

/// CSV with header row and columns k, u1..um, z1..zp; rows k = 0..T.
/// The input fields of the final row are left empty. Throws ConfigError.
TrainingData read_training_csv(std::istream& in, const MatrixXd& obs_matrix, const Zonotope& output_noise);
void write_training_csv(std::ostream& out, const TrainingData& data);

struct DataSequences {
  MatrixXd z_plus;   // z(1..T)
  MatrixXd z_minus;  // z(0..T-1)
  MatrixXd u_minus;  // u(0..T-1)
  std::vector<std::string> warnings;
};

DataSequences split_sequences(const TrainingData& data);

/// Rank of C from singular values above 1e-10 * sigma_max, plus the
/// pieces of the SVD used for reverse mapping.
struct ObservationSvd {
  Eigen::Index rank = 0;
  MatrixXd left_inverse;  // V1 Sigma^{-1} P1'   (n x p)
  MatrixXd null_basis;    // V2                  (n x (n - r))
};

ObservationSvd decompose_observation(const MatrixXd& obs_matrix);

/// Matrix zonotope of the state stacks consistent with an output stack.
///
/// Center V1 S^-1 P1' (Z - c_gamma); one generator V1 S^-1 P1' g_gamma^(i)
/// per column and noise generator; when C has a nontrivial kernel, one
/// generator M v e_t' per kernel basis vector v and column t.
MatrixZonotope reverse_map_outputs(const MatrixXd& outputs, const MatrixXd& obs_matrix, const Zonotope& output_noise,
                                   double state_bound);

struct LearnedModelSet {
  IntervalMatrix m_sigma;  // n x (n+m), encloses every [A B] consistent with the data
  MatrixZonotope m_plus;
  MatrixZonotope m_minus;
  MatrixXd u_minus;
  double state_bound = 0.0;
  Zonotope process_noise;
  std::vector<std::string> warnings;

  Eigen::Index state_dim() const { return m_sigma.rows(); }
  Eigen::Index input_dim() const { return m_sigma.cols() - m_sigma.rows(); }
};

/// [A B] enclosure from (M+ - M_w) [M-; U-]^+ in interval arithmetic.
/// Throws LearningError on insufficient excitation or too-wide intervals.
LearnedModelSet learn_model_set(const TrainingData& data, const Zonotope& process_noise, double state_bound);

}  // namespace zest
