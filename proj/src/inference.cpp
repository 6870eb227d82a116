#include "proxctl/inference.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "proxctl/errors.hpp"
#include "proxctl/util.hpp"

namespace proxctl {

namespace {

constexpr double kMaxFailureShare = 0.10;

void check_config(const BootstrapConfig& config) {
  if (config.draws < 2)
    throw std::invalid_argument("bootstrap: need at least 2 draws");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw std::invalid_argument("bootstrap: level must lie strictly inside (0, 1)");
}

std::vector<int> resample_rows(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = pick(rng);
  return rows;
}

CurveFn casf_curve(const EstimatorConfig& est, const TargetList& targets) {
  if (targets.empty()) throw std::invalid_argument("bootstrap: empty target list");
  return [est, targets](const Dataset& sample) {
    const FittedEstimator fitted = fit(sample, est);
    Eigen::VectorXd out(targets.size());
    for (std::size_t g = 0; g < targets.size(); ++g)
      out(g) = casf(fitted, targets[g].first, targets[g].second);
    return out;
  };
}

}  // namespace

BootstrapResult bootstrap_statistic(const Dataset& data, const CurveFn& curve_fn,
                                    const BootstrapConfig& config) {
  check_config(config);
  validate(data);

  BootstrapResult result;
  result.requested = config.draws;
  result.point = curve_fn(data);
  const int entries = static_cast<int>(result.point.size());

  Eigen::MatrixXd draws(config.draws, entries);
  std::vector<char> ok(config.draws, 0);
  parallel_for(static_cast<std::size_t>(config.draws), [&](std::size_t b) {
    const std::vector<int> rows =
        resample_rows(data.n(), derive_seed(config.seed, b));
    try {
      draws.row(b) = curve_fn(take_rows(data, rows)).transpose();
      ok[b] = 1;
    } catch (const NumericError&) {
      // a degenerate resample, recorded and skipped
    } catch (const DataError&) {
    }
  });

  int kept = 0;
  for (int b = 0; b < config.draws; ++b)
    if (ok[b]) ++kept;
  result.discarded = config.draws - kept;
  if (result.discarded > kMaxFailureShare * config.draws) {
    std::ostringstream msg;
    msg << "bootstrap: " << result.discarded << " of " << config.draws
        << " refits failed, more than the tolerated 10 percent";
    throw BootstrapError(msg.str());
  }
  if (kept < 2) throw BootstrapError("bootstrap: fewer than 2 usable draws");

  result.draws.resize(kept, entries);
  int r = 0;
  for (int b = 0; b < config.draws; ++b)
    if (ok[b]) result.draws.row(r++) = draws.row(b);

  result.se.resize(entries);
  for (int g = 0; g < entries; ++g) {
    const double mean = result.draws.col(g).mean();
    const double ss = (result.draws.col(g).array() - mean).square().sum();
    result.se(g) = std::sqrt(ss / (kept - 1));
  }
  return result;
}

BootstrapResult bootstrap_se(const Dataset& data, const EstimatorConfig& est,
                             const TargetList& targets, const BootstrapConfig& config) {
  return bootstrap_statistic(data, casf_curve(est, targets), config);
}

UniformBands uniform_bands_statistic(const Dataset& data, const CurveFn& curve_fn,
                                     const BootstrapConfig& config) {
  const BootstrapResult boot = bootstrap_statistic(data, curve_fn, config);
  const int entries = static_cast<int>(boot.point.size());
  const int kept = static_cast<int>(boot.draws.rows());

  std::vector<double> sup_stats;
  sup_stats.reserve(kept);
  for (int b = 0; b < kept; ++b) {
    double sup = 0.0;
    bool any = false;
    for (int g = 0; g < entries; ++g) {
      if (boot.se(g) <= 0.0) continue;
      sup = std::max(sup, std::abs(boot.draws(b, g) - boot.point(g)) / boot.se(g));
      any = true;
    }
    if (any) sup_stats.push_back(sup);
  }

  UniformBands bands;
  bands.estimate = boot.point;
  bands.se = boot.se;
  bands.requested = boot.requested;
  bands.discarded = boot.discarded;
  bands.critical = sup_stats.empty() ? 0.0
                                     : order_statistic_quantile(sup_stats, config.level);
  bands.lo = boot.point - bands.critical * boot.se;
  bands.hi = boot.point + bands.critical * boot.se;
  bands.caveat =
      "bands scale pointwise bootstrap sds by the bootstrap quantile of the "
      "supremum t statistic; treat coverage as an approximation";
  return bands;
}

UniformBands uniform_bands(const Dataset& data, const EstimatorConfig& est,
                           const TargetList& targets, const BootstrapConfig& config) {
  return uniform_bands_statistic(data, casf_curve(est, targets), config);
}

}  // namespace proxctl
