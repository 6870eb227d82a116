#include "proxctl/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "proxctl/errors.hpp"

namespace proxctl {

namespace {

void append_monomials_of_degree(int dim, int degree, std::vector<int>& prefix,
                                std::vector<std::vector<int>>& out) {
  if (dim == 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = degree; e >= 0; --e) {
    prefix.push_back(e);
    append_monomials_of_degree(dim - 1, degree - e, prefix, out);
    prefix.pop_back();
  }
}

double monomial_at(const Eigen::RowVectorXd& point, const std::vector<int>& exponents) {
  double value = 1.0;
  for (int k = 0; k < static_cast<int>(exponents.size()); ++k) {
    double p = 1.0;
    for (int e = 0; e < exponents[k]; ++e) p *= point(k);
    value *= p;
  }
  return value;
}

void check_finite(const Eigen::MatrixXd& points) {
  for (int i = 0; i < points.rows(); ++i)
    for (int j = 0; j < points.cols(); ++j)
      if (!std::isfinite(points(i, j))) {
        std::ostringstream msg;
        msg << "evaluate_basis: non-finite input at row " << i << ", column " << j;
        throw DataError(msg.str());
      }
}

bool row_less(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  for (int k = 0; k < a.size(); ++k) {
    if (a(k) < b(k)) return true;
    if (a(k) > b(k)) return false;
  }
  return false;
}

}  // namespace

std::vector<std::vector<int>> enumerate_monomials(int dim, int max_degree) {
  if (dim < 1) throw std::invalid_argument("enumerate_monomials: dim must be positive");
  if (max_degree < 0) throw std::invalid_argument("enumerate_monomials: negative degree");
  std::vector<std::vector<int>> out;
  std::vector<int> prefix;
  for (int degree = 0; degree <= max_degree; ++degree)
    append_monomials_of_degree(dim, degree, prefix, out);
  return out;
}

Eigen::MatrixXd distinct_rows(const Eigen::MatrixXd& points) {
  std::vector<int> order(points.rows());
  for (int i = 0; i < points.rows(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return row_less(points.row(a), points.row(b)); });
  Eigen::MatrixXd out(points.rows(), points.cols());
  int kept = 0;
  for (int idx : order) {
    if (kept == 0 || (out.row(kept - 1) - points.row(idx)).cwiseAbs().maxCoeff() > 0.0)
      out.row(kept++) = points.row(idx);
  }
  return out.topRows(kept);
}

DesignMatrix evaluate_basis(const Eigen::MatrixXd& points, const BasisSpec& spec) {
  if (spec.input_dim <= 0)
    throw std::invalid_argument("evaluate_basis: spec.input_dim not set");
  if (points.cols() != spec.input_dim)
    throw std::invalid_argument("evaluate_basis: points have wrong width");
  check_finite(points);

  DesignMatrix design;
  if (spec.kind == BasisKind::power_series) {
    design.multi_indices = enumerate_monomials(spec.input_dim, spec.max_total_degree);
    const int p = static_cast<int>(design.multi_indices.size());
    design.values.resize(points.rows(), p);
    for (int i = 0; i < points.rows(); ++i)
      for (int j = 0; j < p; ++j)
        design.values(i, j) = monomial_at(points.row(i), design.multi_indices[j]);
    design.intercept_column = 0;  // the zero exponent vector comes first
    return design;
  }

  if (spec.support.rows() == 0)
    throw std::invalid_argument("evaluate_basis: saturated basis has no recorded support");
  if (spec.support.cols() != spec.input_dim)
    throw std::invalid_argument("evaluate_basis: support width mismatch");
  const int levels = static_cast<int>(spec.support.rows());
  design.values = Eigen::MatrixXd::Zero(points.rows(), levels);
  design.intercept_column = -1;
  for (int i = 0; i < points.rows(); ++i) {
    int hit = -1;
    for (int j = 0; j < levels; ++j) {
      if ((points.row(i) - spec.support.row(j)).cwiseAbs().maxCoeff() == 0.0) {
        hit = j;
        break;
      }
    }
    if (hit < 0) {
      std::ostringstream msg;
      msg << "evaluate_basis: row " << i << " (";
      for (int k = 0; k < points.cols(); ++k) msg << (k ? ", " : "") << points(i, k);
      msg << ") is not a recorded support level";
      throw SupportError(msg.str());
    }
    design.values(i, hit) = 1.0;
  }
  return design;
}

Eigen::MatrixXd kron_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("kron_rows: row counts differ");
  const int ka = static_cast<int>(a.cols());
  const int kb = static_cast<int>(b.cols());
  Eigen::MatrixXd out(a.rows(), ka * kb);
  for (int col_a = 0; col_a < ka; ++col_a)
    for (int col_b = 0; col_b < kb; ++col_b)
      out.col(col_a * kb + col_b) = a.col(col_a).cwiseProduct(b.col(col_b));
  return out;
}

int Standardizer::output_intercept() const {
  if (intercept_column < 0) return -1;
  int pos = intercept_column;
  for (int dropped : dropped_columns)
    if (dropped < intercept_column) --pos;
  return pos;
}

Standardizer fit_standardizer(const DesignMatrix& design) {
  const int n = static_cast<int>(design.values.rows());
  const int p = static_cast<int>(design.values.cols());
  if (n < 1) throw std::invalid_argument("fit_standardizer: empty design");

  Standardizer s;
  s.intercept_column = design.intercept_column;
  s.means = design.values.colwise().mean();
  s.sds.resize(p);
  for (int j = 0; j < p; ++j) {
    const double var = (design.values.col(j).array() - s.means(j)).square().sum() / n;
    s.sds(j) = std::sqrt(var);
  }
  for (int j = 0; j < p; ++j) {
    if (j == s.intercept_column) continue;
    // numerically constant columns carry no information and cannot be scaled
    if (s.sds(j) <= 1e-12 * (std::abs(s.means(j)) + 1.0)) s.dropped_columns.push_back(j);
  }
  if (s.intercept_column < 0 && static_cast<int>(s.dropped_columns.size()) == p)
    throw DataError("fit_standardizer: every column is constant and there is no intercept");
  return s;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& values) {
  if (values.cols() != s.input_width())
    throw std::invalid_argument("apply_standardizer: width mismatch");
  Eigen::MatrixXd out(values.rows(), s.output_width());
  int col = 0;
  for (int j = 0; j < s.input_width(); ++j) {
    if (std::find(s.dropped_columns.begin(), s.dropped_columns.end(), j) !=
        s.dropped_columns.end())
      continue;
    if (j == s.intercept_column)
      out.col(col) = values.col(j);
    else
      out.col(col) = (values.col(j).array() - s.means(j)) / s.sds(j);
    ++col;
  }
  return out;
}

DesignMatrix apply_standardizer(const Standardizer& s, const DesignMatrix& design) {
  DesignMatrix out;
  out.values = apply_standardizer(s, design.values);
  if (!design.multi_indices.empty()) {
    for (int j = 0; j < s.input_width(); ++j) {
      if (std::find(s.dropped_columns.begin(), s.dropped_columns.end(), j) !=
          s.dropped_columns.end())
        continue;
      out.multi_indices.push_back(design.multi_indices[j]);
    }
  }
  out.intercept_column = s.output_intercept();
  return out;
}

}  // namespace proxctl
