#include "zest/baseline.hpp"

#include "zest/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zest {

PointModel identify_point_model(const LearnedModelSet& model) {
  const Eigen::Index n = model.m_minus.rows();
  const Eigen::Index m = model.u_minus.rows();
  MatrixXd regressor(n + m, model.u_minus.cols());
  regressor << model.m_minus.center(), model.u_minus;
  const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(regressor);
  if (cod.rank() < n + m) throw LearningError("identify_point_model: regressor is rank deficient");
  const MatrixXd ab = model.m_plus.center() * cod.pseudoInverse();
  return {ab.leftCols(n), ab.rightCols(m)};
}

MatrixXd uniform_covariance(const Zonotope& z) { return z.generators() * z.generators().transpose() / 3.0; }

KfState kf_step(const KfState& s, const VectorXd& u, const VectorXd& y_stack, const PointModel& model,
                const MatrixXd& obs_matrix, const MatrixXd& q, const MatrixXd& r) {
  const Eigen::Index n = s.mean.size();
  if (model.a.rows() != n || obs_matrix.cols() != n || y_stack.size() != obs_matrix.rows() ||
      r.rows() != obs_matrix.rows() || q.rows() != n) {
    throw std::invalid_argument("kf_step: dimension mismatch");
  }
  const VectorXd mean_pred = model.a * s.mean + model.b * u;
  const MatrixXd cov_pred = model.a * s.covariance * model.a.transpose() + q;

  const MatrixXd innovation_cov = obs_matrix * cov_pred * obs_matrix.transpose() + r;
  if (innovation_cov.isZero(0.0)) return {mean_pred, cov_pred};
  const Eigen::LDLT<MatrixXd> ldlt(innovation_cov);
  const VectorXd pivots = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || pivots.minCoeff() <= 1e-14 * pivots.cwiseAbs().maxCoeff()) {
    throw std::runtime_error("kf_step: innovation covariance is singular");
  }
  const MatrixXd gain = ldlt.solve(obs_matrix * cov_pred).transpose();

  KfState out;
  out.mean = mean_pred + gain * (y_stack - obs_matrix * mean_pred);
  const MatrixXd ikc = MatrixXd::Identity(n, n) - gain * obs_matrix;
  out.covariance = ikc * cov_pred * ikc.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

SigmaEllipse three_sigma_ellipse(const KfState& s) {
  const MatrixXd& p = s.covariance;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + p.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("three_sigma_ellipse: covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p);
  const VectorXd& vals = eig.eigenvalues();
  if (vals.size() > 0 && vals.minCoeff() < -1e-12 * (1.0 + vals.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("three_sigma_ellipse: covariance is not positive semidefinite");
  }
  const Eigen::Index n = vals.size();
  SigmaEllipse e;
  e.center = s.mean;
  e.semi_axes.resize(n);
  e.axes.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;  // eigen returns ascending order
    e.semi_axes(i) = 3.0 * std::sqrt(std::max(vals(src), 0.0));
    e.axes.col(i) = eig.eigenvectors().col(src);
  }
  if (n == 2) {
    double angle = std::atan2(e.axes(1, 0), e.axes(0, 0));
    if (angle > std::numbers::pi / 2) angle -= std::numbers::pi;
    if (angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
    e.angle_rad = angle;
  }
  return e;
}

}  // namespace zest
