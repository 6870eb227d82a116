#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "proxctl/dataset.hpp"
#include "proxctl/estimator.hpp"

namespace proxctl {

//! Pairs-bootstrap settings. Every draw resamples whole rows and repeats the
//! entire fitting pipeline, including standardization and penalty selection.
//! Draw b uses the counter-derived seed (seed, b), so results are identical
//! however the draws are scheduled.
struct BootstrapConfig {
  int draws = 1000;
  double level = 0.95;
  std::uint64_t seed = 1;
};

//! A target list is a set of treatment pairs (x1, x2) at which the
//! counterfactual mean is evaluated.
using TargetList = std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>;

//! Any per-sample statistic vector; the bootstrap machinery is agnostic to
//! what the entries mean.
using CurveFn = std::function<Eigen::VectorXd(const Dataset&)>;

struct BootstrapResult {
  Eigen::VectorXd point;      // full-sample statistics
  Eigen::VectorXd se;         // per-entry sd across kept draws
  Eigen::MatrixXd draws;      // kept draws by entries
  int requested = 0;
  int discarded = 0;
};

//! Resamples, refits and records curve_fn per draw. Draws whose refit throws
//! a recoverable error are discarded; more than 10 percent of them is a
//! BootstrapError. Standard deviations use the n-1 convention.
BootstrapResult bootstrap_statistic(const Dataset& data, const CurveFn& curve_fn,
                                    const BootstrapConfig& config);

//! Bootstrap standard errors of casf at the given treatment pairs.
BootstrapResult bootstrap_se(const Dataset& data, const EstimatorConfig& est,
                             const TargetList& targets, const BootstrapConfig& config);

//! Simultaneous confidence bands: the half-width at entry g is the bootstrap
//! sd s(g) scaled by the level-quantile of max_g |draw_b(g) - point(g)| / s(g).
//! Entries with zero sd are excluded from the max and get degenerate bands.
//! The caveat names the approximation; no formal coverage guarantee is
//! claimed for the scaled supremum in this setting.
struct UniformBands {
  Eigen::VectorXd estimate;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Eigen::VectorXd se;
  double critical = 0.0;
  int requested = 0;
  int discarded = 0;
  std::string caveat;
};

UniformBands uniform_bands(const Dataset& data, const EstimatorConfig& est,
                           const TargetList& targets, const BootstrapConfig& config);

//! Bands for an arbitrary statistic vector, used by the curve subcommands.
UniformBands uniform_bands_statistic(const Dataset& data, const CurveFn& curve_fn,
                                     const BootstrapConfig& config);

}  // namespace proxctl
