#pragma once

#include <Eigen/Dense>
#include <vector>

namespace proxctl {

enum class BasisKind { power_series, indicator_saturated };

//! Describes a series basis over a d-dimensional input: either all monomials
//! up to a total degree, or one indicator per observed support point for
//! finite discrete inputs.
struct BasisSpec {
  int input_dim = 0;                       // 0 means infer from the data
  int max_total_degree = 5;
  BasisKind kind = BasisKind::power_series;
  bool standardize = true;
  //! Support levels for indicator_saturated, one row per level. Leave empty
  //! to have the fitting step fill it with the distinct observed rows.
  Eigen::MatrixXd support;
};

//! A realized design together with the bookkeeping needed to map columns
//! back to basis functions.
struct DesignMatrix {
  Eigen::MatrixXd values;
  //! Exponent vectors per column; empty for indicator bases.
  std::vector<std::vector<int>> multi_indices;
  //! Column holding the constant function, -1 when there is none.
  int intercept_column = -1;
};

//! Affine column transform fitted on one design and replayed on others.
//! Means and sds use the population (divide by n) convention. The intercept
//! column passes through untouched; columns with no spread are dropped.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd sds;
  std::vector<int> dropped_columns;   // original indices
  int intercept_column = -1;          // original index, -1 when absent
  int input_width() const { return static_cast<int>(means.size()); }
  int output_width() const { return input_width() - static_cast<int>(dropped_columns.size()); }
  //! Position of the intercept after drops, -1 when absent.
  int output_intercept() const;
};

//! All exponent vectors over dim variables with total degree at most
//! max_degree, in graded lexicographic order (the zero vector first).
std::vector<std::vector<int>> enumerate_monomials(int dim, int max_degree);

//! Evaluates the basis at each row of points. Rejects non-finite inputs and,
//! for indicator bases, any row that matches no recorded support level.
DesignMatrix evaluate_basis(const Eigen::MatrixXd& points, const BasisSpec& spec);

//! Row-wise Kronecker product: column a of A paired with column b of B lands
//! in flat column a * B.cols() + b, so A varies slowly and B varies fast.
Eigen::MatrixXd kron_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Standardizer fit_standardizer(const DesignMatrix& design);

DesignMatrix apply_standardizer(const Standardizer& s, const DesignMatrix& design);

//! Applies the column transform to a bare matrix of design values.
Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::MatrixXd& values);

//! Distinct rows of a matrix in ascending lexicographic order, the support
//! used by saturated indicator bases.
Eigen::MatrixXd distinct_rows(const Eigen::MatrixXd& points);

}  // namespace proxctl
