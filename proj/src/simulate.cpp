#include "proxctl/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "proxctl/errors.hpp"
#include "proxctl/util.hpp"

namespace proxctl {

namespace {

void check_dgp(const GaussianLinearDGP& dgp) {
  for (double p : {dgp.b0, dgp.b1, dgp.b2, dgp.alpha, dgp.sigma_v, dgp.sigma_z, dgp.sigma_y})
    if (!std::isfinite(p)) throw std::invalid_argument("gaussian dgp: non-finite parameter");
  if (dgp.sigma_v < 0.0 || dgp.sigma_z < 0.0 || dgp.sigma_y < 0.0)
    throw std::invalid_argument("gaussian dgp: negative noise scale");
}

}  // namespace

Dataset sample_gaussian(const GaussianLinearDGP& dgp, int n, std::uint64_t seed) {
  check_dgp(dgp);
  if (n < 1) throw std::invalid_argument("sample_gaussian: n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset data;
  data.y.resize(n);
  data.x.resize(n, 1);
  data.z.resize(n, 1);
  data.v.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double u = normal(rng);
    const double x = dgp.alpha * u + normal(rng);
    data.x(i, 0) = x;
    data.v(i, 0) = u + dgp.sigma_v * normal(rng);
    data.z(i, 0) = u + dgp.sigma_z * normal(rng);
    data.y(i) = dgp.b0 + dgp.b1 * x + dgp.b2 * u + dgp.sigma_y * normal(rng);
  }
  return data;
}

double analytic_casf(const GaussianLinearDGP& dgp, double x1, double x2) {
  check_dgp(dgp);
  const double shrink = dgp.alpha / (dgp.alpha * dgp.alpha + 1.0);
  return dgp.b0 + dgp.b1 * x1 + dgp.b2 * shrink * x2;
}

double analytic_naive_casf(const GaussianLinearDGP& dgp, double x1, double x2) {
  check_dgp(dgp);
  // the perfect-controls formula averages E[y | v, x = x1] over v given x2;
  // E[u | v, x] has coefficients from the bivariate normal projection
  const double a = dgp.alpha;
  const double svv = 1.0 + dgp.sigma_v * dgp.sigma_v;
  const double sxx = a * a + 1.0;
  const double det = svv * sxx - a * a;
  if (det <= 0.0) throw NumericError("analytic_naive_casf: degenerate covariance");
  const double coef_v = (sxx - a * a) / det;     // solves [svv a; a sxx] b = [1; a]
  const double coef_x = (svv * a - a) / det;
  const double shrink = a / sxx;                 // E[v | x = x2] = E[u | x = x2]
  return dgp.b0 + dgp.b1 * x1 + dgp.b2 * (coef_v * shrink * x2 + coef_x * x1);
}

Dataset sample_discrete(const DiscreteModel& model, int n, std::uint64_t seed,
                        double y_noise_sd) {
  validate(model);
  if (n < 1) throw std::invalid_argument("sample_discrete: n must be positive");
  if (y_noise_sd < 0.0) throw std::invalid_argument("sample_discrete: negative noise sd");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto draw_index = [&](const double* p, int len) {
    double u = unif(rng);
    for (int i = 0; i < len; ++i) {
      u -= p[i];
      if (u <= 0.0) return i;
    }
    return len - 1;
  };

  const int nx = model.nx(), nz = model.nz(), nv = model.nv();
  Dataset data;
  data.y.resize(n);
  data.x.resize(n, 1);
  data.z.resize(n, 1);
  data.v.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const int w = draw_index(model.p_w.data(), model.nw());
    // p_xz_given_w is column-major, so the flat index runs over x fastest
    const int flat = draw_index(model.p_xz_given_w[w].data(), nx * nz);
    const int ix = flat % nx;
    const int iz = flat / nx;
    const int iv = draw_index(model.p_v_given_w[w].data(), nv);
    data.x(i, 0) = model.x_levels(ix);
    data.z(i, 0) = model.z_levels(iz);
    data.v(i, 0) = model.v_levels(iv);
    data.y(i) = model.mu(ix, w) + y_noise_sd * normal(rng);
  }
  return data;
}

MonteCarloReport monte_carlo(const GaussianLinearDGP& dgp, const EstimatorConfig& est,
                             const MonteCarloConfig& config) {
  check_dgp(dgp);
  if (config.sample_sizes.empty())
    throw std::invalid_argument("monte_carlo: no sample sizes given");
  if (config.replications < 1)
    throw std::invalid_argument("monte_carlo: replications must be positive");

  MonteCarloReport report;
  report.dgp = dgp;
  report.config = config;
  const double truth = analytic_casf(dgp, config.x1, config.x2);
  Eigen::VectorXd x1(1), x2(1);
  x1(0) = config.x1;
  x2(0) = config.x2;

  for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
    const int n = config.sample_sizes[ni];
    MonteCarloCell cell;
    cell.n = n;
    cell.truth = truth;
    cell.estimates.resize(config.replications);
    if (config.include_naive) cell.naive_estimates.resize(config.replications);

    parallel_for(static_cast<std::size_t>(config.replications), [&](std::size_t rep) {
      const std::uint64_t rep_seed =
          derive_seed(config.seed, 100000 * (ni + 1) + rep);
      const Dataset data = sample_gaussian(dgp, n, rep_seed);
      const FittedEstimator fitted = fit(data, est);
      cell.estimates[rep] = casf(fitted, x1, x2);
      if (config.include_naive)
        cell.naive_estimates[rep] = naive_control_estimate(data, est, x1, x2);
    });

    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> abs_errors;
    for (double e : cell.estimates) {
      sum += e;
      abs_errors.push_back(std::abs(e - truth));
    }
    const double mean = sum / cell.estimates.size();
    for (double e : cell.estimates) sum_sq += (e - mean) * (e - mean);
    cell.bias = mean - truth;
    cell.variance = sum_sq / cell.estimates.size();
    cell.mse = cell.variance + cell.bias * cell.bias;
    cell.median_abs_error = median(abs_errors);
    if (config.include_naive) {
      std::vector<double> naive_abs;
      for (double e : cell.naive_estimates) naive_abs.push_back(std::abs(e - truth));
      cell.naive_median_abs_error = median(naive_abs);
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace proxctl
