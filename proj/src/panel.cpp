#include "proxctl/panel.hpp"

#include <sstream>
#include <stdexcept>

#include "proxctl/errors.hpp"

namespace proxctl {

namespace {

void check_target(const PanelDataset& panel, int target_period) {
  validate(panel);
  if (target_period < 2)
    throw DataError("panel split: need at least two periods of history before the target");
  if (target_period > panel.periods()) {
    std::ostringstream msg;
    msg << "panel split: target period " << target_period << " exceeds the "
        << panel.periods() << " observed periods";
    throw DataError(msg.str());
  }
}

ProxySplit build_split(const PanelDataset& panel, int t, bool with_outcomes) {
  check_target(panel, t);
  const int n = panel.n();
  const int dx = panel.dx();
  const int h = t / 2;

  ProxySplit split;
  split.target_period = t;
  split.with_outcomes = with_outcomes;
  split.data.y = panel.y.col(t - 1);
  split.data.x = panel.x[t - 1];

  const int v_periods = h;            // periods 1..h
  const int z_periods = t - h;        // periods h..t-1
  const int dv = v_periods * dx + (with_outcomes ? v_periods : 0);
  const int dz = z_periods * dx + (with_outcomes ? z_periods : 0);
  split.data.v.resize(n, dv);
  split.data.z.resize(n, dz);

  int col = 0;
  for (int p = 1; p <= h; ++p)
    for (int j = 0; j < dx; ++j) {
      split.data.v.col(col++) = panel.x[p - 1].col(j);
      split.v_columns.push_back({p, j, false});
    }
  if (with_outcomes)
    for (int p = 1; p <= h; ++p) {
      split.data.v.col(col++) = panel.y.col(p - 1);
      split.v_columns.push_back({p, 0, true});
    }

  col = 0;
  for (int p = h; p <= t - 1; ++p)
    for (int j = 0; j < dx; ++j) {
      split.data.z.col(col++) = panel.x[p - 1].col(j);
      split.z_columns.push_back({p, j, false});
    }
  if (with_outcomes)
    for (int p = h; p <= t - 1; ++p) {
      split.data.z.col(col++) = panel.y.col(p - 1);
      split.z_columns.push_back({p, 0, true});
    }

  // the period-h block anchors both sides
  for (int j = 0; j < dx; ++j) split.shared_columns.push_back({h, j, false});
  if (with_outcomes) split.shared_columns.push_back({h, 0, true});
  return split;
}

}  // namespace

ProxySplit split_predetermined(const PanelDataset& panel, int target_period) {
  return build_split(panel, target_period, false);
}

ProxySplit split_with_outcomes(const PanelDataset& panel, int target_period) {
  return build_split(panel, target_period, true);
}

OrderConditionReport order_condition(int dim_latent, int target_period, int dx,
                                     bool with_outcomes) {
  if (dim_latent < 0) throw std::invalid_argument("order_condition: negative latent dimension");
  if (target_period < 2)
    throw DataError("order_condition: need at least two periods of history");
  if (dx < 1) throw std::invalid_argument("order_condition: treatment width must be positive");
  const int h = target_period / 2;
  const int per_period = dx + (with_outcomes ? 1 : 0);
  OrderConditionReport report;
  report.dim_v = h * per_period;
  report.dim_z = (target_period - h) * per_period;
  report.max_latent_dim = (h - 1) * per_period;
  report.pass = dim_latent <= report.max_latent_dim;
  return report;
}

}  // namespace proxctl
