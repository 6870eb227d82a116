#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "proxctl/basis.hpp"
#include "proxctl/dataset.hpp"

namespace proxctl {

enum class PenaltyRule {
  fixed,
  gcv_first_stages_plus_scaled_lambda0,
};

//! Configuration of the two-stage penalized sieve estimator. rho expands the
//! outcome-side proxies v, chi the treatment x, psi the pair (x, z).
struct EstimatorConfig {
  BasisSpec rho;
  BasisSpec chi;
  BasisSpec psi;
  PenaltyRule penalty_rule = PenaltyRule::gcv_first_stages_plus_scaled_lambda0;
  double lambda0 = 0.0;  // final minimum-distance step (used when fixed)
  double lambda1 = 0.0;  // outcome regression on psi
  double lambda2 = 0.0;  // rho regression on psi
  double lambda3 = 0.0;  // rho regression on chi
  //! Intercepts are normally exempt from the ridge penalty; setting this
  //! penalizes every column of every design.
  bool penalize_intercepts = false;
  //! Treatments whose distinct-row count is at most this bound switch chi to
  //! a saturated indicator basis; 0 disables the switch.
  int discrete_x_threshold = 10;

  //! Power-series config with the same total degree for every design.
  static EstimatorConfig power_series(int degree);
  //! Saturated indicator config for fully discrete data; supports are taken
  //! from the sample at fit time.
  static EstimatorConfig saturated();
};

//! Immutable fitted state. Evaluation members are const and safe to share
//! across threads.
struct FittedEstimator {
  EstimatorConfig config;        // resolved: supports filled, switches applied
  double lambda0 = 0.0, lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;

  Standardizer rho_std, chi_std, psi_std, phi_std;
  bool rho_standardized = false, chi_standardized = false;
  bool psi_standardized = false, phi_standardized = false;

  Eigen::MatrixXd b_hat;         // psi -> rho coefficients
  Eigen::MatrixXd a_hat;         // chi -> rho coefficients
  Eigen::VectorXd theta;         // minimum-distance coefficients on rho (x) chi
  double theta_residual = 0.0;   // relative residual of the final normal equations

  Eigen::MatrixXd x_train;       // treatment sample, kept for averages and grids
  Eigen::MatrixXd chi_train;     // realized chi design (post standardization)
  Eigen::VectorXd x_min, x_max;  // componentwise observed treatment range
  int n = 0;
  std::vector<std::string> notes;
};

FittedEstimator fit(const Dataset& data, const EstimatorConfig& config);

//! Counterfactual mean of the outcome at treatment x1 for the subpopulation
//! whose observed treatment is x2. Power-series evaluations outside the
//! observed treatment range append a note to warnings when provided;
//! saturated bases reject unseen levels.
double casf(const FittedEstimator& fit, const Eigen::VectorXd& x1,
            const Eigen::VectorXd& x2, std::vector<std::string>* warnings = nullptr);

//! Sample-averaged structural function: mean over observed treatments x_i of
//! casf(x1 | x_i).
double asf_average(const FittedEstimator& fit, const Eigen::VectorXd& x1,
                   std::vector<std::string>* warnings = nullptr);

//! Square matrix with entry (r, c) = casf(level_r | level_c) minus
//! casf(baseline | level_c).
Eigen::MatrixXd effect_table(const FittedEstimator& fit,
                             const std::vector<Eigen::VectorXd>& levels,
                             const Eigen::VectorXd& baseline,
                             std::vector<std::string>* warnings = nullptr);

//! casf(scale * x | x) - casf(x | x) along a grid of scalar treatments.
std::vector<double> scaled_effect_curve(const FittedEstimator& fit, double scale,
                                        const std::vector<double>& grid,
                                        std::vector<std::string>* warnings = nullptr);

//! Default evaluation grid: points evenly spaced between the lower and upper
//! sample quantiles of a scalar treatment.
std::vector<double> default_effect_grid(const FittedEstimator& fit, int points = 100,
                                        double lo_quantile = 0.10,
                                        double hi_quantile = 0.90);

//! Counterfactual distribution estimate: refits with outcome 1{y <= y_cut}.
//! raw is the plain estimate, clamped its projection onto [0, 1].
struct DistributionalCasf {
  double raw = 0.0;
  double clamped = 0.0;
};

DistributionalCasf distributional_casf(const Dataset& data, const EstimatorConfig& config,
                                       double y_cut, const Eigen::VectorXd& x1,
                                       const Eigen::VectorXd& x2);

//! Backdoor comparator that treats v as a perfect control: a series ridge of
//! y on (v, x) features evaluated at x1, projected onto the distribution of
//! v given x = x2. Shares bases and penalty rule with the proxy estimator.
double naive_control_estimate(const Dataset& data, const EstimatorConfig& config,
                              const Eigen::VectorXd& x1, const Eigen::VectorXd& x2);

}  // namespace proxctl
