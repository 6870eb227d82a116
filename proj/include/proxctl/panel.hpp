#pragma once

#include <vector>

#include "proxctl/dataset.hpp"

namespace proxctl {

//! Where a proxy column came from: the period-p treatment component var, or
//! the period-p outcome when outcome is set.
struct ColumnRef {
  int period = 0;  // 1-based
  int var = 0;     // 0-based treatment component, ignored for outcomes
  bool outcome = false;

  bool operator==(const ColumnRef& other) const {
    return period == other.period && var == other.var && outcome == other.outcome;
  }
};

//! Cross-sectional view of a panel around a target period: the period-t
//! outcome and treatment plus proxy blocks v and z drawn from the history.
//! shared_columns lists the refs that appear in both blocks.
struct ProxySplit {
  Dataset data;
  std::vector<ColumnRef> v_columns;
  std::vector<ColumnRef> z_columns;
  std::vector<ColumnRef> shared_columns;
  int target_period = 0;
  bool with_outcomes = false;
};

//! Past treatments as proxies: with h = floor(t/2), v collects periods
//! 1..h and z periods h..t-1, sharing the period-h block.
ProxySplit split_predetermined(const PanelDataset& panel, int target_period);

//! Also recruits past outcomes: v adds outcomes 1..h, z adds outcomes
//! h..t-1, sharing period h on both the treatment and outcome side.
ProxySplit split_with_outcomes(const PanelDataset& panel, int target_period);

//! Counting bound on the latent dimension a split can support. For
//! treatments of width dx the cap is (floor(t/2) - 1) * dx, or
//! (floor(t/2) - 1) * (dx + 1) when outcomes join the proxy blocks.
struct OrderConditionReport {
  bool pass = false;
  int max_latent_dim = 0;
  int dim_v = 0;
  int dim_z = 0;
};

OrderConditionReport order_condition(int dim_latent, int target_period, int dx,
                                     bool with_outcomes);

}  // namespace proxctl
