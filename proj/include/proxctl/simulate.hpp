#pragma once

#include <cstdint>
#include <vector>

#include "proxctl/dataset.hpp"
#include "proxctl/discrete.hpp"
#include "proxctl/estimator.hpp"

namespace proxctl {

//! Linear Gaussian design with a scalar latent confounder u:
//!   y = b0 + b1 x + b2 u + sigma_y e_y,   x = alpha u + e_x,
//!   v = u + sigma_v e_v,                  z = u + sigma_z e_z,
//! all shocks independent standard normal.
struct GaussianLinearDGP {
  double b0 = 1.0;
  double b1 = 1.0;
  double b2 = 1.0;
  double alpha = 1.0;
  double sigma_v = 0.5;
  double sigma_z = 0.5;
  double sigma_y = 0.5;
};

Dataset sample_gaussian(const GaussianLinearDGP& dgp, int n, std::uint64_t seed);

//! Closed-form counterfactual mean: b0 + b1 x1 + b2 * alpha/(alpha^2+1) * x2.
double analytic_casf(const GaussianLinearDGP& dgp, double x1, double x2);

//! What the backdoor formula converges to when the noisy proxy v is treated
//! as a perfect control; differs from analytic_casf whenever sigma_v > 0.
double analytic_naive_casf(const GaussianLinearDGP& dgp, double x1, double x2);

//! Draws an iid sample from a finite-support model. Outcomes are the
//! structural means plus centered Gaussian noise with the given sd.
Dataset sample_discrete(const DiscreteModel& model, int n, std::uint64_t seed,
                        double y_noise_sd = 0.0);

//! Replication study of the proxy estimator against the closed-form truth,
//! with the perfect-controls comparator fitted on the same draws. Each
//! replication gets its own counter-derived seed, so the report does not
//! depend on scheduling.
struct MonteCarloConfig {
  std::vector<int> sample_sizes;
  int replications = 100;
  std::uint64_t seed = 1;
  double x1 = 1.0;
  double x2 = -1.0;
  bool include_naive = true;
};

struct MonteCarloCell {
  int n = 0;
  std::vector<double> estimates;
  std::vector<double> naive_estimates;
  double truth = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double median_abs_error = 0.0;
  double naive_median_abs_error = 0.0;
};

struct MonteCarloReport {
  GaussianLinearDGP dgp;
  MonteCarloConfig config;
  std::vector<MonteCarloCell> cells;
};

MonteCarloReport monte_carlo(const GaussianLinearDGP& dgp, const EstimatorConfig& est,
                             const MonteCarloConfig& config);

}  // namespace proxctl
