#include "proxctl/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "proxctl/errors.hpp"
#include "proxctl/ridge.hpp"
#include "proxctl/util.hpp"

namespace proxctl {

namespace {

//! Designs realized on the sample, after support resolution and
//! standardization. phi is the row-wise Kronecker product rho (x) chi that
//! carries the minimum-distance coefficients.
struct ResolvedDesigns {
  EstimatorConfig config;
  DesignMatrix rho, chi, psi;
  Standardizer rho_std, chi_std, psi_std, phi_std;
  bool rho_standardized = false, chi_standardized = false;
  bool psi_standardized = false, phi_standardized = false;
  Eigen::MatrixXd phi;
  int phi_intercept = -1;  // column index in phi after standardization
  std::vector<std::string> notes;
};

void resolve_input_dim(BasisSpec& spec, int dim, const char* name) {
  if (spec.input_dim == 0) spec.input_dim = dim;
  if (spec.input_dim != dim) {
    std::ostringstream msg;
    msg << "estimator config: " << name << " basis expects input dimension "
        << spec.input_dim << " but the data provide " << dim;
    throw std::invalid_argument(msg.str());
  }
}

void resolve_support(BasisSpec& spec, const Eigen::MatrixXd& points,
                     std::vector<std::string>& notes, const char* name) {
  if (spec.kind != BasisKind::indicator_saturated) return;
  if (spec.support.rows() == 0) spec.support = distinct_rows(points);
  if (spec.standardize) {
    // centering a saturated design removes the constant function from its
    // span, so indicator bases are always used on their natural scale
    spec.standardize = false;
    notes.push_back(std::string(name) + ": saturated basis used unstandardized");
  }
}

std::vector<bool> penalty_mask(int width, int intercept, bool penalize_intercepts) {
  std::vector<bool> mask(width, true);
  if (!penalize_intercepts && intercept >= 0) mask[intercept] = false;
  return mask;
}

ResolvedDesigns resolve_designs(const Dataset& data, const EstimatorConfig& config) {
  validate(data);
  ResolvedDesigns r;
  r.config = config;

  resolve_input_dim(r.config.rho, data.dv(), "rho");
  resolve_input_dim(r.config.chi, data.dx(), "chi");
  resolve_input_dim(r.config.psi, data.dx() + data.dz(), "psi");

  if (r.config.chi.kind == BasisKind::power_series && r.config.discrete_x_threshold > 0) {
    const Eigen::MatrixXd levels = distinct_rows(data.x);
    if (levels.rows() <= r.config.discrete_x_threshold) {
      r.config.chi.kind = BasisKind::indicator_saturated;
      r.config.chi.support = levels;
      std::ostringstream note;
      note << "treatment has " << levels.rows()
           << " distinct values, chi switched to a saturated indicator basis";
      r.notes.push_back(note.str());
    }
  }

  Eigen::MatrixXd xz(data.n(), data.dx() + data.dz());
  xz << data.x, data.z;
  resolve_support(r.config.rho, data.v, r.notes, "rho");
  resolve_support(r.config.chi, data.x, r.notes, "chi");
  resolve_support(r.config.psi, xz, r.notes, "psi");

  r.rho = evaluate_basis(data.v, r.config.rho);
  r.chi = evaluate_basis(data.x, r.config.chi);
  r.psi = evaluate_basis(xz, r.config.psi);

  if (r.config.rho.standardize) {
    r.rho_std = fit_standardizer(r.rho);
    r.rho = apply_standardizer(r.rho_std, r.rho);
    r.rho_standardized = true;
  }
  if (r.config.chi.standardize) {
    r.chi_std = fit_standardizer(r.chi);
    r.chi = apply_standardizer(r.chi_std, r.chi);
    r.chi_standardized = true;
  }
  if (r.config.psi.standardize) {
    r.psi_std = fit_standardizer(r.psi);
    r.psi = apply_standardizer(r.psi_std, r.psi);
    r.psi_standardized = true;
  }

  r.phi = kron_rows(r.rho.values, r.chi.values);
  const int l = static_cast<int>(r.chi.values.cols());
  if (r.rho.intercept_column >= 0 && r.chi.intercept_column >= 0)
    r.phi_intercept = r.rho.intercept_column * l + r.chi.intercept_column;
  if (r.rho_standardized && r.chi_standardized) {
    DesignMatrix phi_design;
    phi_design.values = std::move(r.phi);
    phi_design.intercept_column = r.phi_intercept;
    r.phi_std = fit_standardizer(phi_design);
    r.phi = apply_standardizer(r.phi_std, phi_design.values);
    r.phi_intercept = r.phi_std.output_intercept();
    r.phi_standardized = true;
  }
  return r;
}

void check_fixed_lambdas(const EstimatorConfig& config) {
  for (double lambda : {config.lambda0, config.lambda1, config.lambda2, config.lambda3})
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("estimator config: penalties must be finite and nonnegative");
}

//! Evaluates the chi basis at one treatment point on the training scale,
//! recording an extrapolation note for power-series bases.
Eigen::RowVectorXd chi_at(const FittedEstimator& fit, const Eigen::VectorXd& x,
                          std::vector<std::string>* warnings) {
  if (x.size() != fit.x_min.size())
    throw std::invalid_argument("casf: treatment point has wrong dimension");
  if (!x.allFinite()) throw DataError("casf: treatment point has non-finite entries");
  if (fit.config.chi.kind == BasisKind::power_series && warnings) {
    for (int k = 0; k < x.size(); ++k) {
      if (x(k) < fit.x_min(k) || x(k) > fit.x_max(k)) {
        std::ostringstream msg;
        msg << "extrapolation: treatment component " << k << " at " << x(k)
            << " is outside the observed range [" << fit.x_min(k) << ", "
            << fit.x_max(k) << "]";
        warnings->push_back(msg.str());
        break;
      }
    }
  }
  DesignMatrix row = evaluate_basis(x.transpose(), fit.config.chi);
  if (fit.chi_standardized)
    return apply_standardizer(fit.chi_std, row.values).row(0);
  return row.values.row(0);
}

//! Assembles the evaluation functional for a pair of chi rows: the predicted
//! rho moment at x2 Kronecker the chi expansion of x1, on the phi scale.
Eigen::RowVectorXd alpha_row(const FittedEstimator& fit, const Eigen::RowVectorXd& chi_x1,
                             const Eigen::RowVectorXd& rho_moment) {
  Eigen::MatrixXd raw = kron_rows(rho_moment, chi_x1);
  if (fit.phi_standardized) return apply_standardizer(fit.phi_std, raw).row(0);
  return raw.row(0);
}

}  // namespace

EstimatorConfig EstimatorConfig::power_series(int degree) {
  EstimatorConfig config;
  config.rho.max_total_degree = degree;
  config.chi.max_total_degree = degree;
  config.psi.max_total_degree = degree;
  return config;
}

EstimatorConfig EstimatorConfig::saturated() {
  EstimatorConfig config;
  config.rho.kind = BasisKind::indicator_saturated;
  config.chi.kind = BasisKind::indicator_saturated;
  config.psi.kind = BasisKind::indicator_saturated;
  config.rho.standardize = false;
  config.chi.standardize = false;
  config.psi.standardize = false;
  return config;
}

FittedEstimator fit(const Dataset& data, const EstimatorConfig& config) {
  ResolvedDesigns r = resolve_designs(data, config);
  const double n = static_cast<double>(data.n());
  const bool pen_all = r.config.penalize_intercepts;
  const auto psi_mask = penalty_mask(static_cast<int>(r.psi.values.cols()),
                                     r.psi.intercept_column, pen_all);
  const auto chi_mask = penalty_mask(static_cast<int>(r.chi.values.cols()),
                                     r.chi.intercept_column, pen_all);
  const auto phi_mask = penalty_mask(static_cast<int>(r.phi.cols()),
                                     r.phi_intercept, pen_all);

  FittedEstimator out;
  out.config = r.config;
  out.notes = r.notes;
  if (r.config.penalty_rule == PenaltyRule::fixed) {
    check_fixed_lambdas(r.config);
    out.lambda1 = r.config.lambda1;
    out.lambda2 = r.config.lambda2;
    out.lambda3 = r.config.lambda3;
  } else {
    out.lambda1 = gcv_select(r.psi.values, data.y, psi_mask).lambda;
    out.lambda2 = gcv_select(r.psi.values, r.rho.values, psi_mask).lambda;
    out.lambda3 = gcv_select(r.chi.values, r.rho.values, chi_mask).lambda;
  }

  const RidgeFit g_stage = ridge_fit(r.psi.values, data.y, out.lambda1, psi_mask);
  const Eigen::VectorXd g_hat = ridge_predict(g_stage, r.psi.values);

  const RidgeFit moment_stage = ridge_fit(r.psi.values, r.rho.values, out.lambda2, psi_mask);
  out.b_hat = moment_stage.coefficients;
  const Eigen::MatrixXd rho_pred = r.psi.values * out.b_hat;

  const RidgeFit projection_stage = ridge_fit(r.chi.values, r.rho.values, out.lambda3, chi_mask);
  out.a_hat = projection_stage.coefficients;

  Eigen::MatrixXd pi = kron_rows(rho_pred, r.chi.values);
  if (r.phi_standardized) pi = apply_standardizer(r.phi_std, pi);

  if (r.config.penalty_rule == PenaltyRule::fixed) {
    out.lambda0 = r.config.lambda0;
  } else {
    // mean Gram eigenvalue shrunk at the parametric rate
    const double trace = pi.squaredNorm() / n;
    out.lambda0 = trace / static_cast<double>(pi.cols()) / std::sqrt(n);
  }

  const RidgeFit distance_stage = ridge_fit(pi, g_hat, out.lambda0, phi_mask);
  out.theta = distance_stage.coefficients.col(0);

  {
    Eigen::MatrixXd m = (pi.transpose() * pi) / n;
    Eigen::VectorXd d = Eigen::VectorXd::Ones(pi.cols());
    for (int j = 0; j < static_cast<int>(phi_mask.size()); ++j)
      if (!phi_mask[j]) d(j) = 0.0;
    m += (out.lambda0 * d).asDiagonal();
    const Eigen::VectorXd b = (pi.transpose() * g_hat) / n;
    out.theta_residual = (m * out.theta - b).norm() / std::max(1.0, b.norm());
  }

  out.rho_std = r.rho_std;
  out.chi_std = r.chi_std;
  out.psi_std = r.psi_std;
  out.phi_std = r.phi_std;
  out.rho_standardized = r.rho_standardized;
  out.chi_standardized = r.chi_standardized;
  out.psi_standardized = r.psi_standardized;
  out.phi_standardized = r.phi_standardized;
  out.x_train = data.x;
  out.chi_train = r.chi.values;
  out.x_min = data.x.colwise().minCoeff();
  out.x_max = data.x.colwise().maxCoeff();
  out.n = data.n();
  return out;
}

double casf(const FittedEstimator& fit, const Eigen::VectorXd& x1,
            const Eigen::VectorXd& x2, std::vector<std::string>* warnings) {
  const Eigen::RowVectorXd chi_x1 = chi_at(fit, x1, warnings);
  const Eigen::RowVectorXd chi_x2 = chi_at(fit, x2, warnings);
  const Eigen::RowVectorXd rho_moment = chi_x2 * fit.a_hat;
  return alpha_row(fit, chi_x1, rho_moment).dot(fit.theta);
}

double asf_average(const FittedEstimator& fit, const Eigen::VectorXd& x1,
                   std::vector<std::string>* warnings) {
  const Eigen::RowVectorXd chi_x1 = chi_at(fit, x1, warnings);
  // averaging commutes with the affine evaluation functional, so the mean
  // predicted rho moment yields the exact average of casf(x1 | x_i)
  const Eigen::RowVectorXd rho_moment =
      (fit.chi_train * fit.a_hat).colwise().mean();
  return alpha_row(fit, chi_x1, rho_moment).dot(fit.theta);
}

Eigen::MatrixXd effect_table(const FittedEstimator& fit,
                             const std::vector<Eigen::VectorXd>& levels,
                             const Eigen::VectorXd& baseline,
                             std::vector<std::string>* warnings) {
  const int k = static_cast<int>(levels.size());
  if (k == 0) throw std::invalid_argument("effect_table: no levels given");
  Eigen::MatrixXd table(k, k);
  for (int c = 0; c < k; ++c) {
    const double base = casf(fit, baseline, levels[c], warnings);
    for (int r = 0; r < k; ++r)
      table(r, c) = casf(fit, levels[r], levels[c], warnings) - base;
  }
  return table;
}

std::vector<double> scaled_effect_curve(const FittedEstimator& fit, double scale,
                                        const std::vector<double>& grid,
                                        std::vector<std::string>* warnings) {
  if (fit.x_min.size() != 1)
    throw std::invalid_argument("scaled_effect_curve: requires a scalar treatment");
  std::vector<double> out;
  out.reserve(grid.size());
  Eigen::VectorXd x(1), sx(1);
  for (double g : grid) {
    x(0) = g;
    sx(0) = scale * g;
    out.push_back(casf(fit, sx, x, warnings) - casf(fit, x, x, warnings));
  }
  return out;
}

std::vector<double> default_effect_grid(const FittedEstimator& fit, int points,
                                        double lo_quantile, double hi_quantile) {
  if (fit.x_train.cols() != 1)
    throw std::invalid_argument("default_effect_grid: requires a scalar treatment");
  if (points < 2) throw std::invalid_argument("default_effect_grid: need at least 2 points");
  std::vector<double> sample(fit.x_train.data(), fit.x_train.data() + fit.x_train.rows());
  const double lo = quantile(sample, lo_quantile);
  const double hi = quantile(sample, hi_quantile);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

DistributionalCasf distributional_casf(const Dataset& data, const EstimatorConfig& config,
                                       double y_cut, const Eigen::VectorXd& x1,
                                       const Eigen::VectorXd& x2) {
  Dataset indicator = data;
  for (int i = 0; i < indicator.n(); ++i)
    indicator.y(i) = data.y(i) <= y_cut ? 1.0 : 0.0;
  const FittedEstimator fitted = fit(indicator, config);
  DistributionalCasf out;
  out.raw = casf(fitted, x1, x2);
  out.clamped = std::min(1.0, std::max(0.0, out.raw));
  return out;
}

double naive_control_estimate(const Dataset& data, const EstimatorConfig& config,
                              const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
  ResolvedDesigns r = resolve_designs(data, config);
  const bool pen_all = r.config.penalize_intercepts;
  const auto chi_mask = penalty_mask(static_cast<int>(r.chi.values.cols()),
                                     r.chi.intercept_column, pen_all);
  const auto phi_mask = penalty_mask(static_cast<int>(r.phi.cols()),
                                     r.phi_intercept, pen_all);

  double lambda_outcome, lambda_projection;
  if (r.config.penalty_rule == PenaltyRule::fixed) {
    check_fixed_lambdas(r.config);
    lambda_outcome = r.config.lambda0;
    lambda_projection = r.config.lambda3;
  } else {
    lambda_outcome = gcv_select(r.phi, data.y, phi_mask).lambda;
    lambda_projection = gcv_select(r.chi.values, r.rho.values, chi_mask).lambda;
  }

  const RidgeFit outcome_stage = ridge_fit(r.phi, data.y, lambda_outcome, phi_mask);
  const RidgeFit projection_stage =
      ridge_fit(r.chi.values, r.rho.values, lambda_projection, chi_mask);

  // reuse the fitted-estimator evaluation path by assembling a minimal view
  FittedEstimator view;
  view.config = r.config;
  view.chi_std = r.chi_std;
  view.phi_std = r.phi_std;
  view.chi_standardized = r.chi_standardized;
  view.phi_standardized = r.phi_standardized;
  view.a_hat = projection_stage.coefficients;
  view.theta = outcome_stage.coefficients.col(0);
  view.x_min = data.x.colwise().minCoeff();
  view.x_max = data.x.colwise().maxCoeff();
  return casf(view, x1, x2, nullptr);
}

}  // namespace proxctl
