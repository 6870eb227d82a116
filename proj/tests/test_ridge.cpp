#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "proxctl/errors.hpp"
#include "proxctl/ridge.hpp"

using namespace proxctl;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

TEST_CASE("intercept-only fit recovers the sample mean") {
  Eigen::VectorXd y(4);
  y << 2, 4, 6, 16;
  const RidgeFit f = ridge_fit(Eigen::MatrixXd::Ones(4, 1), y, 0.0);
  CHECK(f.coefficients(0, 0) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("unit problem with unit penalty halves the coefficient") {
  // (1/n) X'X = 1 and (1/n) X'y = 1, so (1 + 1) c = 1.
  const RidgeFit f =
      ridge_fit(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), 1.0);
  CHECK(std::abs(f.coefficients(0, 0) - 0.5) < 1e-14);
}

TEST_CASE("zero-penalty residuals are orthogonal to the design") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd x = random_matrix(rng, 60, 5);
  const Eigen::VectorXd y = random_matrix(rng, 60, 1);
  const RidgeFit f = ridge_fit(x, y, 0.0);
  CHECK((x.transpose() * (y - x * f.coefficients)).norm() / 60.0 < 1e-10);
}

TEST_CASE("coefficient norm shrinks monotonically in the penalty") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd x = random_matrix(rng, 40, 4);
  const Eigen::VectorXd y = random_matrix(rng, 40, 1);
  double previous = 1e300;
  for (const double lambda : {0.0, 1e-4, 1e-2, 1.0, 1e2, 1e6, 1e12}) {
    const double norm = ridge_fit(x, y, lambda).coefficients.norm();
    CHECK(norm <= previous + 1e-12);
    previous = norm;
  }
  CHECK(ridge_fit(x, y, 1e12).coefficients.norm() < 1e-6);
}

TEST_CASE("unpenalized intercepts survive heavy shrinkage") {
  std::mt19937_64 rng(13);
  Eigen::MatrixXd x(50, 2);
  x.col(0).setOnes();
  x.col(1) = random_matrix(rng, 50, 1);
  Eigen::VectorXd y = 3.0 * Eigen::VectorXd::Ones(50) + random_matrix(rng, 50, 1);
  const RidgeFit f = ridge_fit(x, y, 1e12, {false, true});
  CHECK(f.coefficients(0, 0) == doctest::Approx(y.mean()).epsilon(1e-9));
  CHECK(std::abs(f.coefficients(1, 0)) < 1e-9);
}

TEST_CASE("solver matches an explicit eigendecomposition") {
  std::mt19937_64 rng(14);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 20 + trial % 30, k = 2 + trial % 5, q = 1 + trial % 3;
    const Eigen::MatrixXd x = random_matrix(rng, n, k);
    const Eigen::MatrixXd y = random_matrix(rng, n, q);
    const double lambda = std::pow(10.0, -6 + (trial % 9));
    const RidgeFit f = ridge_fit(x, y, lambda);
    const Eigen::MatrixXd gram =
        x.transpose() * x / n + lambda * Eigen::MatrixXd::Identity(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::MatrixXd reference = eig.eigenvectors() *
                                      eig.eigenvalues().cwiseInverse().asDiagonal() *
                                      eig.eigenvectors().transpose() *
                                      (x.transpose() * y / n);
    worst = std::max(worst, (f.coefficients - reference).norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("rank-deficient unpenalized systems raise a singularity error") {
  Eigen::MatrixXd x(5, 2);
  x.col(0) = Eigen::VectorXd::LinSpaced(5, 1, 5);
  x.col(1) = 2.0 * x.col(0);
  const Eigen::VectorXd y = x.col(0);
  CHECK_THROWS_AS(ridge_fit(x, y, 0.0), SingularityError);
  try {
    ridge_fit(x, y, 0.0);
  } catch (const SingularityError& e) {
    CHECK(e.rank == 1);
    CHECK(e.dimension == 2);
  }
  // A positive penalty regularizes the same system.
  CHECK_NOTHROW(ridge_fit(x, y, 0.1));
}

TEST_CASE("prediction applies the fitted coefficients") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 1, 1, 1, 2;
  Eigen::VectorXd y(3);
  y << 1, 3, 5;
  const RidgeFit f = ridge_fit(x, y, 0.0);
  const Eigen::MatrixXd fitted = ridge_predict(f, x);
  CHECK((fitted - y).norm() < 1e-10);
}

TEST_CASE("generalized cross-validation prefers light penalties on exact fits") {
  std::mt19937_64 rng(15);
  const Eigen::MatrixXd x = random_matrix(rng, 80, 3);
  const Eigen::VectorXd beta = Eigen::Vector3d(1.0, -2.0, 0.5);
  const Eigen::VectorXd clean = x * beta;
  const GcvResult exact = gcv_select(x, clean);
  CHECK(exact.lambda <= 1e-6);

  // With p comparable to n, fitting pure noise inflates the degrees-of-freedom
  // correction, so cross-validation should move well away from lambda = 0.
  const Eigen::MatrixXd wide = random_matrix(rng, 30, 15);
  const Eigen::VectorXd noise = random_matrix(rng, 30, 1);
  const GcvResult pure_noise = gcv_select(wide, noise);
  CHECK(pure_noise.lambda > 1e-4);
  CHECK(std::isfinite(pure_noise.score));
  CHECK(pure_noise.grid.size() == default_gcv_grid().size());
  const auto best = std::min_element(pure_noise.scores.begin(), pure_noise.scores.end());
  CHECK(pure_noise.score == doctest::Approx(*best));
}

TEST_CASE("the default penalty grid spans 1e-8 to 1e2 in quarter decades") {
  const std::vector<double> grid = default_gcv_grid();
  CHECK(grid.size() == 41);
  CHECK(grid.front() == doctest::Approx(1e-8));
  CHECK(grid.back() == doctest::Approx(1e2));
  CHECK(grid[1] / grid[0] == doctest::Approx(std::pow(10.0, 0.25)));
}

TEST_CASE("multi-target fits solve each column against the shared design") {
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd x = random_matrix(rng, 30, 3);
  const Eigen::MatrixXd y = random_matrix(rng, 30, 2);
  const RidgeFit joint = ridge_fit(x, y, 0.5);
  const RidgeFit first = ridge_fit(x, y.col(0), 0.5);
  const RidgeFit second = ridge_fit(x, y.col(1), 0.5);
  CHECK((joint.coefficients.col(0) - first.coefficients.col(0)).norm() < 1e-12);
  CHECK((joint.coefficients.col(1) - second.coefficients.col(0)).norm() < 1e-12);
}
