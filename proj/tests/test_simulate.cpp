#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "proxctl/simulate.hpp"

using namespace proxctl;

namespace {

//! Posterior mean of the confounder given x via Riemann integration of the
//! two structural equations, independent of the closed-form coefficient.
double quadrature_casf(const GaussianLinearDGP& dgp, double x1, double x2) {
  double mass = 0.0, mean = 0.0;
  const double step = 5e-4;
  for (double u = -12.0; u <= 12.0; u += step) {
    const double residual = x2 - dgp.alpha * u;
    const double weight = std::exp(-0.5 * u * u - 0.5 * residual * residual);
    mass += weight;
    mean += u * weight;
  }
  return dgp.b0 + dgp.b1 * x1 + dgp.b2 * mean / mass;
}

}  // namespace

TEST_CASE("closed-form counterfactual mean: frozen values and quadrature") {
  const GaussianLinearDGP dgp;  // defaults: all coefficients 1, noise sds 0.5
  CHECK(analytic_casf(dgp, 1.0, -1.0) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(analytic_casf(dgp, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(analytic_casf(dgp, 2.0, 4.0) == doctest::Approx(5.0).epsilon(1e-13));

  GaussianLinearDGP skew;
  skew.b0 = -0.5;
  skew.b1 = 2.0;
  skew.b2 = -1.3;
  skew.alpha = 1.7;
  CHECK(analytic_casf(skew, 0.4, 0.8) ==
        doctest::Approx(-0.5 + 0.8 - 1.3 * (1.7 / (1.7 * 1.7 + 1.0)) * 0.8)
            .epsilon(1e-13));
  CHECK(analytic_casf(skew, 0.4, 0.8) ==
        doctest::Approx(quadrature_casf(skew, 0.4, 0.8)).epsilon(1e-6));
  CHECK(analytic_casf(dgp, 1.0, -1.0) ==
        doctest::Approx(quadrature_casf(dgp, 1.0, -1.0)).epsilon(1e-6));
}

TEST_CASE("the naive proxy-as-control estimand carries a known bias") {
  const GaussianLinearDGP dgp;
  // Regressing y on (x, v) gives confounder coefficients (1/6, 2/3), and
  // E[v | x] = x/2, so the naive value at (1, -1) is 2 + 1/6 - 1/3 = 11/6.
  CHECK(analytic_naive_casf(dgp, 1.0, -1.0) ==
        doctest::Approx(11.0 / 6.0).epsilon(1e-12));

  GaussianLinearDGP perfect = dgp;
  perfect.sigma_v = 0.0;  // v reveals u, so controlling for it is valid
  for (const double x2 : {-1.0, 0.0, 2.5}) {
    CHECK(std::abs(analytic_naive_casf(perfect, 1.0, x2) -
                   analytic_casf(perfect, 1.0, x2)) < 1e-12);
  }
  CHECK(std::abs(analytic_naive_casf(dgp, 1.0, -1.0) -
                 analytic_casf(dgp, 1.0, -1.0)) > 0.3);
}

TEST_CASE("gaussian sampler is seed-deterministic with the stated moments") {
  const GaussianLinearDGP dgp;
  const Dataset a = sample_gaussian(dgp, 500, 42);
  const Dataset b = sample_gaussian(dgp, 500, 42);
  const Dataset c = sample_gaussian(dgp, 500, 43);
  CHECK((a.y.array() == b.y.array()).all());
  CHECK((a.x.array() == b.x.array()).all());
  CHECK((a.z.array() == b.z.array()).all());
  CHECK((a.v.array() == b.v.array()).all());
  CHECK_FALSE((a.y.array() == c.y.array()).all());

  const Dataset big = sample_gaussian(dgp, 50000, 7);
  REQUIRE(big.n() == 50000);
  const auto centered = [](const Eigen::VectorXd& col) {
    return (col.array() - col.mean()).matrix();
  };
  const Eigen::VectorXd xc = centered(big.x.col(0));
  const Eigen::VectorXd vc = centered(big.v.col(0));
  const Eigen::VectorXd zc = centered(big.z.col(0));
  const double n = static_cast<double>(big.n());
  CHECK(xc.squaredNorm() / n == doctest::Approx(2.0).epsilon(0.05));    // alpha^2 + 1
  CHECK(vc.squaredNorm() / n == doctest::Approx(1.25).epsilon(0.05));   // 1 + sigma_v^2
  CHECK(xc.dot(vc) / n == doctest::Approx(1.0).epsilon(0.05));          // alpha
  CHECK(xc.dot(zc) / n == doctest::Approx(1.0).epsilon(0.05));
  CHECK(big.y.mean() == doctest::Approx(1.0).epsilon(0.05));            // b0
}

TEST_CASE("finite-support sampler reproduces the observable law") {
  const DiscreteModel m = random_model(2, 2, 3, 3, 11);
  const JointLaw law = observable_law(m);
  const Dataset d = sample_discrete(m, 100000, 314, 0.0);
  const JointLaw hat = empirical_law(d);
  REQUIRE(hat.nx() == law.nx());
  REQUIRE(hat.nz() == law.nz());
  REQUIRE(hat.nv() == law.nv());
  for (int ix = 0; ix < law.nx(); ++ix)
    CHECK((hat.p_xzv[ix] - law.p_xzv[ix]).cwiseAbs().maxCoeff() < 0.02);
  // With zero outcome noise the cell mean averages structural means over the
  // latent mix within the cell, so it converges to ey_xz without bias.
  for (int ix = 0; ix < law.nx(); ++ix)
    for (int iz = 0; iz < law.nz(); ++iz)
      if (hat.p_xzv[ix].row(iz).sum() > 0.01)
        CHECK(std::abs(hat.ey_xz(ix, iz) - law.ey_xz(ix, iz)) < 0.05);

  const Dataset r1 = sample_discrete(m, 200, 9, 0.25);
  const Dataset r2 = sample_discrete(m, 200, 9, 0.25);
  CHECK((r1.y.array() == r2.y.array()).all());
  CHECK((r1.x.array() == r2.x.array()).all());
}

TEST_CASE("replication study is deterministic and centered on the truth") {
  const GaussianLinearDGP dgp;
  MonteCarloConfig cfg;
  cfg.sample_sizes = {200, 400};
  cfg.replications = 5;
  cfg.seed = 21;
  const EstimatorConfig est = EstimatorConfig::power_series(2);
  const MonteCarloReport r1 = monte_carlo(dgp, est, cfg);
  const MonteCarloReport r2 = monte_carlo(dgp, est, cfg);
  REQUIRE(r1.cells.size() == 2);
  for (std::size_t c = 0; c < r1.cells.size(); ++c) {
    const MonteCarloCell& cell = r1.cells[c];
    CHECK(cell.n == cfg.sample_sizes[c]);
    CHECK(cell.truth == doctest::Approx(analytic_casf(dgp, cfg.x1, cfg.x2)).epsilon(1e-13));
    REQUIRE(cell.estimates.size() == 5);
    REQUIRE(cell.naive_estimates.size() == 5);
    CHECK(cell.estimates == r2.cells[c].estimates);
    CHECK(cell.naive_estimates == r2.cells[c].naive_estimates);
    // Summary statistics are consistent with the raw estimates.
    double mean = 0.0;
    for (const double e : cell.estimates) mean += e;
    mean /= static_cast<double>(cell.estimates.size());
    CHECK(cell.bias == doctest::Approx(mean - cell.truth).epsilon(1e-12));
    double mse = 0.0;
    for (const double e : cell.estimates) mse += (e - cell.truth) * (e - cell.truth);
    mse /= static_cast<double>(cell.estimates.size());
    CHECK(cell.mse == doctest::Approx(mse).epsilon(1e-12));
  }

  MonteCarloConfig lean = cfg;
  lean.include_naive = false;
  const MonteCarloReport r3 = monte_carlo(dgp, est, lean);
  CHECK(r3.cells[0].naive_estimates.empty());
  CHECK(r3.cells[0].estimates == r1.cells[0].estimates);
}
