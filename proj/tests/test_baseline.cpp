#include "zest/baseline.hpp"

#include "zest/errors.hpp"
#include "zest/harness.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace zest;
using namespace zest::test_support;

namespace {

MatrixXd ab_true(const ScenarioConfig& cfg) {
  MatrixXd ab(2, 3);
  ab << cfg.a_true, cfg.b_true;
  return ab;
}

}  // namespace

TEST(IdentifyPointModel, NoiselessRecoversTruth) {
  ScenarioConfig cfg = ScenarioConfig::rotating_target();
  cfg.sensors = {{MatrixXd::Identity(2, 2), Zonotope(VectorXd::Zero(2)), Zonotope(VectorXd::Zero(2))}};
  cfg.process_noise = Zonotope(VectorXd::Zero(2));
  const GeneratedData data = generate_data(cfg);
  const PointModel pm = identify_point_model(learn_model_set(data.training, cfg.process_noise, cfg.state_bound));
  EXPECT_LE((pm.a - cfg.a_true).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((pm.b - cfg.b_true).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(IdentifyPointModel, InsideLearnedSet) {
  const ScenarioConfig cfg = ScenarioConfig::rotating_target();
  const LearnedModelSet model = learn_model_set(generate_data(cfg).training, cfg.process_noise, cfg.state_bound);
  const PointModel pm = identify_point_model(model);
  MatrixXd ab(2, 3);
  ab << pm.a, pm.b;
  EXPECT_TRUE(model.m_sigma.contains(ab));
  const MatrixXd dev = (ab - ab_true(cfg)).cwiseAbs();
  EXPECT_TRUE((dev.array() <= 2.0 * model.m_sigma.radius().array() + 1e-12).all());
}

TEST(UniformCovariance, MatchesSampleCovariance) {
  std::mt19937_64 rng(1);
  const Zonotope z = random_zonotope(2, 4, rng);
  const int n = 100000;
  MatrixXd samples(2, n);
  for (int i = 0; i < n; ++i) samples.col(i) = sample_point(z, rng);
  const VectorXd mean = samples.rowwise().mean();
  const MatrixXd centered = samples.colwise() - mean;
  const MatrixXd sample_cov = centered * centered.transpose() / (n - 1);
  const MatrixXd cov = uniform_covariance(z);
  EXPECT_LE((sample_cov - cov).norm(), 0.05 * cov.norm());
}

TEST(KfStep, ExactTrackingWithoutNoise) {
  const ScenarioConfig cfg = ScenarioConfig::rotating_target();
  const PointModel pm{cfg.a_true, cfg.b_true};
  const MatrixXd c = MatrixXd::Identity(2, 2), zero = MatrixXd::Zero(2, 2);
  VectorXd x = cfg.x0_true;
  KfState s{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  for (int k = 0; k < 30; ++k) {
    const VectorXd u = VectorXd::Constant(1, std::sin(0.3 * k));
    x = cfg.a_true * x + cfg.b_true * u;
    s = kf_step(s, u, x, pm, c, zero, zero);
    EXPECT_LE((s.mean - x).norm(), 1e-10) << "k=" << k;
  }
}

TEST(KfStep, ScalarRiccati) {
  const PointModel pm{MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1)};
  const MatrixXd one = MatrixXd::Identity(1, 1);
  const KfState s = kf_step({VectorXd::Zero(1), one}, VectorXd::Zero(1), VectorXd::Constant(1, 3.0), pm, one, one, one);
  EXPECT_NEAR(s.covariance(0, 0), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(s.mean(0), 2.0, 1e-14);
}

TEST(KfStep, UpdateNeverIncreasesTrace) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const MatrixXd a = random_matrix(3, 3, rng), gq = random_matrix(3, 3, rng, 0.3), gr = random_matrix(2, 2, rng, 0.3);
    const MatrixXd c = random_matrix(2, 3, rng);
    const PointModel pm{a, random_matrix(3, 1, rng)};
    const MatrixXd p0 = random_matrix(3, 3, rng);
    const KfState s0{random_vector(3, rng), p0 * p0.transpose()};
    const MatrixXd q = gq * gq.transpose(), r = gr * gr.transpose() + 1e-3 * MatrixXd::Identity(2, 2);
    const KfState s1 = kf_step(s0, VectorXd::Ones(1), random_vector(2, rng), pm, c, q, r);
    const double predicted_trace = (a * s0.covariance * a.transpose() + q).trace();
    EXPECT_LE(s1.covariance.trace(), predicted_trace + 1e-10);
  }
}

TEST(KfStep, LongRunStaysPsd) {
  const ScenarioConfig cfg = ScenarioConfig::rotating_target();
  const MatrixXd c = cfg.stacked_obs_matrix();
  const MatrixXd r = 0.01 * MatrixXd::Identity(c.rows(), c.rows());
  KfState s{VectorXd::Zero(2), 100.0 * MatrixXd::Identity(2, 2)};
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    s = kf_step(s, VectorXd::Zero(1), random_vector(c.rows(), rng), {cfg.a_true, cfg.b_true}, c,
                0.001 * MatrixXd::Identity(2, 2), r);
    ASSERT_LE((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(s.covariance).eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(KfStep, Errors) {
  const PointModel pm{MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 1)};
  const KfState s{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  const MatrixXd c = (MatrixXd(1, 2) << 1, 0).finished();
  EXPECT_THROW(kf_step(s, VectorXd::Zero(1), VectorXd::Zero(2), pm, c, MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 1)),
               std::invalid_argument);
  const KfState flat{VectorXd::Zero(2), (MatrixXd(2, 2) << 0, 0, 0, 1).finished()};
  EXPECT_THROW(kf_step(flat, VectorXd::Zero(1), VectorXd::Zero(2), pm, MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2),
                       MatrixXd::Zero(2, 2)),
               std::runtime_error);
}

TEST(SigmaEllipse, Axes) {
  const SigmaEllipse circle = three_sigma_ellipse({VectorXd::Ones(2), MatrixXd::Identity(2, 2)});
  EXPECT_NEAR(circle.semi_axes(0), 3.0, 1e-14);
  EXPECT_NEAR(circle.semi_axes(1), 3.0, 1e-14);
  EXPECT_EQ(circle.center, VectorXd::Ones(2));

  const SigmaEllipse e = three_sigma_ellipse({VectorXd::Zero(2), (MatrixXd(2, 2) << 4, 0, 0, 1).finished()});
  EXPECT_NEAR(e.semi_axes(0), 6.0, 1e-14);
  EXPECT_NEAR(e.semi_axes(1), 3.0, 1e-14);
  EXPECT_NEAR(e.angle_rad, 0.0, 1e-14);

  const double th = 0.4;
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(th).toRotationMatrix();
  const MatrixXd p = rot * Eigen::Vector2d(9, 1).asDiagonal() * rot.transpose();
  const SigmaEllipse r = three_sigma_ellipse({VectorXd::Zero(2), p});
  EXPECT_NEAR(r.semi_axes(0), 9.0, 1e-12);
  EXPECT_NEAR(r.semi_axes(1), 3.0, 1e-12);
  EXPECT_NEAR(r.angle_rad, th, 1e-12);
}

TEST(SigmaEllipse, RejectsInvalidCovariance) {
  EXPECT_THROW(three_sigma_ellipse({VectorXd::Zero(2), (MatrixXd(2, 2) << 1, 0, 0, -1).finished()}),
               std::invalid_argument);
  EXPECT_THROW(three_sigma_ellipse({VectorXd::Zero(2), (MatrixXd(2, 2) << 1, 0.5, 0, 1).finished()}),
               std::invalid_argument);
}
