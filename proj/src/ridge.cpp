#include "proxctl/ridge.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "proxctl/errors.hpp"

namespace proxctl {

namespace {

constexpr double kRankCutoff = 1e-12;       // relative eigenvalue cutoff
constexpr double kSolveTolerance = 1e-8;    // relative normal-equation residual

void check_matrix(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    std::ostringstream msg;
    msg << "ridge_fit: " << what << " contains NaN or Inf";
    throw std::invalid_argument(msg.str());
  }
}

Eigen::VectorXd penalty_diagonal(int p, const std::vector<bool>& mask) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(p);
  if (!mask.empty()) {
    if (static_cast<int>(mask.size()) != p)
      throw std::invalid_argument("ridge_fit: penalize_mask length mismatch");
    for (int j = 0; j < p; ++j) d(j) = mask[j] ? 1.0 : 0.0;
  }
  return d;
}

//! Solves M C = B for symmetric positive semi-definite M, falling back from
//! a Cholesky factorization to an eigendecomposition when M is near singular.
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b,
                          double lambda) {
  const int p = static_cast<int>(m.rows());
  const double b_scale = std::max(1.0, b.norm());

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd c = llt.solve(b);
    if ((m * c - b).norm() <= kSolveTolerance * b_scale) return c;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericError("ridge_fit: eigendecomposition of the Gram matrix failed");
  const Eigen::VectorXd& d = eig.eigenvalues();
  const double cutoff = kRankCutoff * std::max(d.cwiseAbs().maxCoeff(),
                                               std::numeric_limits<double>::min());
  int rank = 0;
  for (int j = 0; j < p; ++j)
    if (d(j) > cutoff) ++rank;
  if (rank < p) {
    std::ostringstream msg;
    msg << "ridge system is singular" << (lambda == 0.0 ? " at lambda = 0" : "")
        << ": numerical rank " << rank << " of " << p;
    throw SingularityError(msg.str(), rank, p);
  }
  Eigen::MatrixXd c = eig.eigenvectors() *
                      d.cwiseInverse().asDiagonal() *
                      (eig.eigenvectors().transpose() * b);
  if ((m * c - b).norm() > kSolveTolerance * b_scale)
    throw NumericError("ridge_fit: normal equations could not be solved to tolerance");
  return c;
}

}  // namespace

RidgeFit ridge_fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                   double lambda, const std::vector<bool>& penalize_mask) {
  if (features.rows() != targets.rows())
    throw std::invalid_argument("ridge_fit: row counts differ");
  if (features.rows() == 0)
    throw std::invalid_argument("ridge_fit: empty sample");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("ridge_fit: lambda must be finite and nonnegative");
  check_matrix(features, "features");
  check_matrix(targets, "targets");

  const double n = static_cast<double>(features.rows());
  const int p = static_cast<int>(features.cols());
  const Eigen::VectorXd d = penalty_diagonal(p, penalize_mask);

  Eigen::MatrixXd m = (features.transpose() * features) / n;
  m += (lambda * d).asDiagonal();
  const Eigen::MatrixXd b = (features.transpose() * targets) / n;

  RidgeFit fit;
  fit.coefficients = solve_spd(m, b, lambda);
  fit.lambda = lambda;
  fit.penalize_mask = penalize_mask;
  return fit;
}

Eigen::MatrixXd ridge_predict(const RidgeFit& fit, const Eigen::MatrixXd& features) {
  if (features.cols() != fit.coefficients.rows())
    throw std::invalid_argument("ridge_predict: feature width mismatch");
  check_matrix(features, "features");
  return features * fit.coefficients;
}

std::vector<double> default_gcv_grid() {
  // quarter-decade ladder from 1e-8 to 1e2, suited to standardized designs
  std::vector<double> grid;
  for (double e = -8.0; e <= 2.0 + 1e-9; e += 0.25) grid.push_back(std::pow(10.0, e));
  return grid;
}

GcvResult gcv_select(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                     const std::vector<bool>& penalize_mask,
                     const std::vector<double>& grid) {
  if (features.rows() != targets.rows())
    throw std::invalid_argument("gcv_select: row counts differ");
  if (grid.empty()) throw std::invalid_argument("gcv_select: empty grid");
  check_matrix(features, "features");
  check_matrix(targets, "targets");

  const double n = static_cast<double>(features.rows());
  const int p = static_cast<int>(features.cols());
  const int q = static_cast<int>(targets.cols());
  const Eigen::VectorXd d = penalty_diagonal(p, penalize_mask);

  const Eigen::MatrixXd gram = (features.transpose() * features) / n;
  const Eigen::MatrixXd xty = (features.transpose() * targets) / n;
  const double yty = targets.squaredNorm() / n;

  GcvResult result;
  result.score = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    Eigen::MatrixXd m = gram;
    m += (lambda * d).asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    double score = std::numeric_limits<double>::infinity();
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      const Eigen::MatrixXd c = ldlt.solve(xty);
      // residual sum of squares in Gram space:
      //   ||Y - XC||^2 / n = Y'Y/n - 2 tr(C'X'Y)/n + tr(C'GC)
      const double rss = yty - 2.0 * (c.array() * xty.array()).sum() +
                         (c.array() * (gram * c).array()).sum();
      const double edf = ldlt.solve(gram).trace();
      const double denom = 1.0 - edf / n;
      if (denom > 1e-10 && std::isfinite(rss))
        score = std::max(rss, 0.0) / static_cast<double>(q) / (denom * denom);
    }
    result.grid.push_back(lambda);
    result.scores.push_back(score);
    if (score < result.score) {
      result.score = score;
      result.lambda = lambda;
    }
  }
  if (!std::isfinite(result.score)) {
    // every grid point failed, fall back to the heaviest penalty
    result.lambda = grid.back();
    result.score = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace proxctl
