#pragma once

#include "zest/constrained_zonotope.hpp"
#include "zest/estimate.hpp"
#include "zest/zonotope.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace zest::test_support {

inline MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

inline VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  return random_matrix(n, 1, rng, scale);
}

inline VectorXd random_beta(Eigen::Index k, std::mt19937_64& rng) { return random_vector(k, rng, 1.0); }

inline Zonotope random_zonotope(Eigen::Index n, Eigen::Index ng, std::mt19937_64& rng, double scale = 1.0) {
  return Zonotope(random_vector(n, rng, 2.0 * scale), random_matrix(n, ng, rng, scale));
}

/// max over the set of d'x, in closed form.
inline double support(const Zonotope& z, const VectorXd& d) {
  return d.dot(z.center()) + (z.generators().transpose() * d).cwiseAbs().sum();
}

/// A point strictly outside z by `gap` along a random direction.
inline VectorXd outside_point(const Zonotope& z, std::mt19937_64& rng, double gap) {
  VectorXd d = random_vector(z.dim(), rng);
  d.normalize();
  const VectorXd signs = (z.generators().transpose() * d).unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
  return z.center() + z.generators() * signs + gap * d;
}

/// Constrained zonotope with feasible constraints: b = A beta0 for a random
/// beta0 strictly inside the unit box.
inline ConstrainedZonotope random_feasible_cz(Eigen::Index n, Eigen::Index ng, Eigen::Index nc,
                                             std::mt19937_64& rng) {
  const MatrixXd a = random_matrix(nc, ng, rng);
  const VectorXd beta0 = random_vector(ng, rng, 0.5);
  return ConstrainedZonotope(random_vector(n, rng, 2.0), random_matrix(n, ng, rng), a, a * beta0);
}

/// Predicted set, sensors and readings of a state drawn from the set,
/// so the true intersection is nonempty.
struct UpdateInstance {
  Zonotope predicted;
  std::vector<Measurement> measurements;
  VectorXd truth;
};

inline UpdateInstance random_update_instance(std::mt19937_64& rng, Eigen::Index max_dim = 3, int max_sensors = 2,
                                             Eigen::Index max_generators = 8) {
  std::uniform_int_distribution<Eigen::Index> dim(1, max_dim);
  std::uniform_int_distribution<int> sensors(1, max_sensors);
  const Eigen::Index n = dim(rng);
  std::uniform_int_distribution<Eigen::Index> gens(1, max_generators);
  UpdateInstance inst;
  inst.predicted = random_zonotope(n, gens(rng), rng);
  inst.truth = sample_point(inst.predicted, rng);
  const int q = sensors(rng);
  for (int i = 0; i < q; ++i) {
    std::uniform_int_distribution<Eigen::Index> rows(1, n);
    const Eigen::Index p = rows(rng);
    std::uniform_int_distribution<Eigen::Index> ng(p, p + 1);
    SensorModel s{random_matrix(p, n, rng), Zonotope(random_vector(p, rng, 0.1), random_matrix(p, ng(rng), rng, 0.5))};
    inst.measurements.push_back({s.obs_matrix * inst.truth + sample_point(s.noise, rng), s});
  }
  return inst;
}

/// |(I - sum L_i C_i) G|_F^2 + sum_i |L_i G_vi|_F^2, evaluated directly.
inline double lambda_objective(const MatrixXd& gt, const std::vector<SensorModel>& sensors,
                               const std::vector<MatrixXd>& lambdas) {
  MatrixXd gain = MatrixXd::Identity(gt.rows(), gt.rows());
  double noise = 0.0;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    gain -= lambdas[i] * sensors[i].obs_matrix;
    noise += (lambdas[i] * sensors[i].noise.generators()).squaredNorm();
  }
  return (gain * gt).squaredNorm() + noise;
}

/// Numeric minimiser of lambda_objective by accelerated gradient descent.
inline std::vector<MatrixXd> minimise_lambda_numerically(const MatrixXd& gt, const std::vector<SensorModel>& sensors,
                                                         int iterations = 200000) {
  const Eigen::Index n = gt.rows();
  Eigen::Index p = 0;
  for (const auto& s : sensors) p += s.outputs();
  MatrixXd c(p, n);
  MatrixXd noise_gram = MatrixXd::Zero(p, p);
  Eigen::Index row = 0;
  for (const auto& s : sensors) {
    c.middleRows(row, s.outputs()) = s.obs_matrix;
    noise_gram.block(row, row, s.outputs(), s.outputs()) = s.noise.generators() * s.noise.generators().transpose();
    row += s.outputs();
  }
  const MatrixXd pg = gt * gt.transpose();
  const MatrixXd hess = c * pg * c.transpose() + noise_gram;
  const double lipschitz = 2.0 * Eigen::SelfAdjointEigenSolver<MatrixXd>(hess).eigenvalues().maxCoeff();
  const auto grad = [&](const MatrixXd& l) {
    return MatrixXd(-2.0 * (MatrixXd::Identity(n, n) - l * c) * pg * c.transpose() + 2.0 * l * noise_gram);
  };
  MatrixXd x = MatrixXd::Zero(n, p), y = x;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const MatrixXd g = grad(y);
    if (g.norm() < 1e-13) break;
    const MatrixXd next = y - g / lipschitz;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
  }
  std::vector<MatrixXd> out;
  row = 0;
  for (const auto& s : sensors) {
    out.push_back(x.middleCols(row, s.outputs()));
    row += s.outputs();
  }
  return out;
}

inline std::vector<SensorModel> sensors_of(const std::vector<Measurement>& ms) {
  std::vector<SensorModel> out;
  for (const auto& m : ms) out.push_back(m.sensor);
  return out;
}

/// x in the predicted set and consistent with every reading.
inline bool consistent(const UpdateInstance& inst, const VectorXd& x, double tol) {
  if (!contains_point(inst.predicted, x, tol)) return false;
  for (const auto& m : inst.measurements) {
    if (!contains_point(m.sensor.noise, m.y - m.sensor.obs_matrix * x, tol)) return false;
  }
  return true;
}

}  // namespace zest::test_support
