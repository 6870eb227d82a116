#include "proxctl/dataset.hpp"

#include <sstream>

#include "proxctl/errors.hpp"

namespace proxctl {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    std::ostringstream msg;
    msg << "dataset: " << name << " contains NaN or Inf";
    throw DataError(msg.str());
  }
}

}  // namespace

void validate(const Dataset& data) {
  const int n = data.n();
  if (n == 0) throw DataError("dataset: empty sample");
  if (data.x.rows() != n || data.z.rows() != n || data.v.rows() != n)
    throw DataError("dataset: y, x, z, v must have the same number of rows");
  if (data.dx() == 0) throw DataError("dataset: treatment block x is empty");
  if (data.dz() == 0) throw DataError("dataset: proxy block z is empty");
  if (data.dv() == 0) throw DataError("dataset: proxy block v is empty");
  require_finite(data.y, "y");
  require_finite(data.x, "x");
  require_finite(data.z, "z");
  require_finite(data.v, "v");
}

Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  const int m = static_cast<int>(rows.size());
  out.y.resize(m);
  out.x.resize(m, data.x.cols());
  out.z.resize(m, data.z.cols());
  out.v.resize(m, data.v.cols());
  for (int i = 0; i < m; ++i) {
    const int r = rows[i];
    if (r < 0 || r >= data.n()) throw std::invalid_argument("take_rows: index out of range");
    out.y(i) = data.y(r);
    out.x.row(i) = data.x.row(r);
    out.z.row(i) = data.z.row(r);
    out.v.row(i) = data.v.row(r);
  }
  return out;
}

void validate(const PanelDataset& panel) {
  const int n = panel.n();
  const int t = panel.periods();
  if (n == 0 || t == 0) throw DataError("panel: empty panel");
  if (static_cast<int>(panel.x.size()) != t)
    throw DataError("panel: treatment blocks must cover every period");
  const int dx = panel.dx();
  if (dx == 0) throw DataError("panel: treatment block is empty");
  for (int s = 0; s < t; ++s) {
    if (panel.x[s].rows() != n || panel.x[s].cols() != dx)
      throw DataError("panel: treatment block shapes disagree across periods");
    require_finite(panel.x[s], "x");
  }
  require_finite(panel.y, "y");
  if (!panel.period_labels.empty() && static_cast<int>(panel.period_labels.size()) != t)
    throw DataError("panel: period label count mismatch");
  if (!panel.unit_ids.empty() && static_cast<int>(panel.unit_ids.size()) != n)
    throw DataError("panel: unit id count mismatch");
}

}  // namespace proxctl
