#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace proxctl {

//! Cross-sectional sample: outcome y, treatment x, outcome-side proxies v
//! and treatment-side proxies z, one row per unit.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;
  Eigen::MatrixXd v;

  int n() const { return static_cast<int>(y.size()); }
  int dx() const { return static_cast<int>(x.cols()); }
  int dz() const { return static_cast<int>(z.cols()); }
  int dv() const { return static_cast<int>(v.cols()); }
};

//! Throws DataError when row counts disagree or any entry is non-finite.
void validate(const Dataset& data);

//! Returns the dataset restricted to the given row indices (with repeats
//! allowed), the resampling primitive used by the bootstrap.
Dataset take_rows(const Dataset& data, const std::vector<int>& rows);

//! Balanced panel in wide form: column t of y is the period-t outcome and
//! x[t] holds the period-t treatment block, periods indexed from 1.
struct PanelDataset {
  Eigen::MatrixXd y;                   // units by periods
  std::vector<Eigen::MatrixXd> x;      // one units-by-dx block per period
  std::vector<double> period_labels;   // ascending labels, one per period
  std::vector<std::string> unit_ids;   // optional, one per unit

  int n() const { return static_cast<int>(y.rows()); }
  int periods() const { return static_cast<int>(y.cols()); }
  int dx() const { return x.empty() ? 0 : static_cast<int>(x[0].cols()); }
};

//! Throws DataError on shape mismatches or non-finite entries.
void validate(const PanelDataset& panel);

}  // namespace proxctl
