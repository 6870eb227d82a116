#include <doctest.h>

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "proxctl/basis.hpp"
#include "proxctl/errors.hpp"

using namespace proxctl;

namespace {

Eigen::MatrixXd rowvec(std::initializer_list<double> values) {
  Eigen::MatrixXd m(1, values.size());
  int j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

}  // namespace

TEST_CASE("monomial enumeration is graded lexicographic") {
  const auto mono = enumerate_monomials(2, 2);
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1},
                                               {2, 0}, {1, 1}, {0, 2}};
  CHECK(mono == expected);
}

TEST_CASE("monomial count matches the stars-and-bars formula") {
  // C(3 + 5, 5) = 56 exponent vectors over three variables up to degree 5.
  CHECK(enumerate_monomials(3, 5).size() == 56);
  CHECK(enumerate_monomials(1, 4).size() == 5);
  CHECK(enumerate_monomials(4, 0).size() == 1);
}

TEST_CASE("power basis evaluates monomials in enumeration order") {
  BasisSpec spec;
  spec.input_dim = 2;
  spec.max_total_degree = 2;
  const DesignMatrix design = evaluate_basis(rowvec({2.0, 3.0}), spec);
  Eigen::VectorXd expected(6);
  expected << 1, 2, 3, 4, 6, 9;
  CHECK((design.values.row(0).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(design.intercept_column == 0);
  CHECK(design.multi_indices.size() == 6);
}

TEST_CASE("power basis rejects non-finite inputs and dimension mismatches") {
  BasisSpec spec;
  spec.input_dim = 2;
  CHECK_THROWS_AS(evaluate_basis(rowvec({1.0, 2.0, 3.0}), spec), std::invalid_argument);
  Eigen::MatrixXd bad = rowvec({1.0, std::nan("")});
  CHECK_THROWS_AS(evaluate_basis(bad, spec), DataError);
}

TEST_CASE("row-wise kronecker product is slow-in-a fast-in-b") {
  const Eigen::MatrixXd a = rowvec({1.0, 2.0});
  const Eigen::MatrixXd b = rowvec({3.0, 4.0});
  const Eigen::MatrixXd k = kron_rows(a, b);
  Eigen::VectorXd expected(4);
  expected << 3, 4, 6, 8;
  CHECK((k.row(0).transpose() - expected).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd a2(2, 2), b2(2, 3);
  a2 << 1, 2, 5, 7;
  b2 << 3, 4, 1, 0, 1, 2;
  const Eigen::MatrixXd k2 = kron_rows(a2, b2);
  CHECK(k2.rows() == 2);
  CHECK(k2.cols() == 6);
  CHECK(k2(1, 0) == 0.0);   // a2(1,0) * b2(1,0)
  CHECK(k2(1, 5) == 14.0);  // a2(1,1) * b2(1,2)
}

TEST_CASE("standardizer maps a two-point column to plus and minus one") {
  DesignMatrix design;
  design.values.resize(2, 2);
  design.values << 1, 0, 1, 2;
  design.intercept_column = 0;
  design.multi_indices = {{0}, {1}};
  const Standardizer s = fit_standardizer(design);
  const DesignMatrix out = apply_standardizer(s, design);
  CHECK(out.values(0, 0) == 1.0);  // intercept untouched
  CHECK(out.values(0, 1) == doctest::Approx(-1.0));
  CHECK(out.values(1, 1) == doctest::Approx(1.0));
  CHECK(s.output_intercept() == 0);
}

TEST_CASE("standardizer drops flat columns and keeps the intercept") {
  DesignMatrix design;
  design.values.resize(3, 3);
  design.values << 1, 5, 0,
                   1, 5, 1,
                   1, 5, 2;
  design.intercept_column = 0;
  design.multi_indices = {{0, 0}, {9, 9}, {0, 1}};
  const Standardizer s = fit_standardizer(design);
  CHECK(s.dropped_columns == std::vector<int>{1});
  const DesignMatrix out = apply_standardizer(s, design);
  CHECK(out.values.cols() == 2);
  CHECK(out.intercept_column == 0);
  CHECK(out.multi_indices == std::vector<std::vector<int>>{{0, 0}, {0, 1}});
  CHECK(out.values.col(1).sum() == doctest::Approx(0.0));
}

TEST_CASE("standardizer refuses designs with no surviving column") {
  DesignMatrix design;
  design.values = Eigen::MatrixXd::Constant(4, 1, 3.0);
  design.multi_indices = {{1}};
  CHECK_THROWS_AS(fit_standardizer(design), DataError);
}

TEST_CASE("standardizer replays the training transform on new points") {
  DesignMatrix train;
  train.values.resize(4, 2);
  train.values << 1, 0, 1, 2, 1, 4, 1, 6;
  train.intercept_column = 0;
  train.multi_indices = {{0}, {1}};
  const Standardizer s = fit_standardizer(train);
  Eigen::MatrixXd fresh(1, 2);
  fresh << 1, 3;
  const Eigen::MatrixXd out = apply_standardizer(s, fresh);
  // Training mean 3, population sd sqrt(5).
  CHECK(out(0, 1) == doctest::Approx(0.0));
  CHECK(apply_standardizer(s, train.values)(0, 1) ==
        doctest::Approx(-3.0 / std::sqrt(5.0)));
}

TEST_CASE("distinct rows sort lexicographically") {
  Eigen::MatrixXd points(4, 2);
  points << 1, 1, 0, 2, 1, 1, 0, 1;
  const Eigen::MatrixXd d = distinct_rows(points);
  CHECK(d.rows() == 3);
  CHECK(d(0, 0) == 0.0);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 0) == 0.0);
  CHECK(d(1, 1) == 2.0);
  CHECK(d(2, 0) == 1.0);
}

TEST_CASE("saturated basis one-hot encodes known levels and rejects others") {
  BasisSpec spec;
  spec.kind = BasisKind::indicator_saturated;
  spec.input_dim = 1;
  spec.support.resize(3, 1);
  spec.support << 0, 1, 2;
  Eigen::MatrixXd points(2, 1);
  points << 2, 0;
  const DesignMatrix design = evaluate_basis(points, spec);
  CHECK(design.values.rows() == 2);
  CHECK(design.values.cols() == 3);
  CHECK(design.values(0, 2) == 1.0);
  CHECK(design.values(0, 0) == 0.0);
  CHECK(design.values(1, 0) == 1.0);
  CHECK(design.intercept_column == -1);

  Eigen::MatrixXd unseen(1, 1);
  unseen << 7;
  CHECK_THROWS_AS(evaluate_basis(unseen, spec), SupportError);
}
