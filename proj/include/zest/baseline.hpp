#pragma once

#include "zest/learn.hpp"
#include "zest/zonotope.hpp"

namespace zest {

struct KfState {
  VectorXd mean;
  MatrixXd covariance;
};

struct PointModel {
  MatrixXd a;  // n x n
  MatrixXd b;  // n x m
};

/// Least-squares model from the set centers: C+ [C-; U-]^+.
PointModel identify_point_model(const LearnedModelSet& model);

/// Second moment of the uniform distribution on the factor box: G G' / 3.
MatrixXd uniform_covariance(const Zonotope& z);

/// Predict with (A, B, Q), then update with the stacked observation (C, R).
/// The covariance update uses the Joseph form; an exactly zero innovation
/// covariance leaves the prediction unchanged.
KfState kf_step(const KfState& s, const VectorXd& u, const VectorXd& y_stack, const PointModel& model,
                const MatrixXd& obs_matrix, const MatrixXd& q, const MatrixXd& r);

struct SigmaEllipse {
  VectorXd center;
  VectorXd semi_axes;  // 3 sqrt(eigenvalue), descending
  MatrixXd axes;       // unit eigenvectors as columns, same order
  double angle_rad = 0.0;  // of the major axis (2-D only)
};

SigmaEllipse three_sigma_ellipse(const KfState& s);

}  // namespace zest
