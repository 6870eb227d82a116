#pragma once

#include <Eigen/Dense>
#include <vector>

namespace proxctl {

//! Closed-form ridge regression, multi-target. Coefficients solve
//!   ((1/n) X'X + lambda * diag(mask)) C = (1/n) X'Y,
//! which minimizes (1/n) sum_i ||y_i - x_i'C||^2 + lambda ||mask .* C||_F^2.
struct RidgeFit {
  Eigen::MatrixXd coefficients;   // features by targets
  double lambda = 0.0;
  std::vector<bool> penalize_mask;
};

//! An empty mask penalizes every column. Throws SingularityError when the
//! system is rank deficient beyond the relative cutoff 1e-12, reporting the
//! numerical rank.
RidgeFit ridge_fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                   double lambda, const std::vector<bool>& penalize_mask = {});

Eigen::MatrixXd ridge_predict(const RidgeFit& fit, const Eigen::MatrixXd& features);

//! Generalized cross-validation over a penalty grid. The score is
//!   (RSS / (n q)) / (1 - edf / n)^2  with edf = tr((G + lambda D)^{-1} G),
//! computed from Gram-space quantities so the grid sweep costs O(p^3) per
//! point regardless of n.
struct GcvResult {
  double lambda = 0.0;
  double score = 0.0;
  std::vector<double> grid;
  std::vector<double> scores;
};

std::vector<double> default_gcv_grid();

GcvResult gcv_select(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                     const std::vector<bool>& penalize_mask = {},
                     const std::vector<double>& grid = default_gcv_grid());

}  // namespace proxctl
