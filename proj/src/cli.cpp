#include "proxctl/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdlib>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "proxctl/dataset.hpp"
#include "proxctl/discrete.hpp"
#include "proxctl/errors.hpp"
#include "proxctl/estimator.hpp"
#include "proxctl/inference.hpp"
#include "proxctl/io.hpp"
#include "proxctl/panel.hpp"
#include "proxctl/simulate.hpp"
#include "proxctl/util.hpp"
#include "proxctl/version.hpp"

namespace proxctl {

namespace {

using Json = nlohmann::ordered_json;

//! Options shared by every subcommand that fits the estimator.
struct DesignOptions {
  int degree = 2;
  int rho_degree = -1;  // negative means: use degree
  int chi_degree = -1;
  int psi_degree = -1;
  bool saturated = false;
  bool no_standardize = false;
  bool penalize_intercepts = false;
  int discrete_x_threshold = 10;
  std::string penalties = "auto";
  double lambda0 = 0.0, lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
};

void add_design_options(CLI::App* cmd, DesignOptions& d) {
  cmd->add_option("--degree", d.degree, "Total polynomial degree for every basis")
      ->capture_default_str();
  cmd->add_option("--rho-degree", d.rho_degree, "Degree override for the proxy basis rho");
  cmd->add_option("--chi-degree", d.chi_degree, "Degree override for the treatment basis chi");
  cmd->add_option("--psi-degree", d.psi_degree, "Degree override for the instrument basis psi");
  cmd->add_flag("--saturated", d.saturated,
                "Indicator bases on the observed supports (discrete data)");
  cmd->add_flag("--no-standardize", d.no_standardize, "Skip column standardization");
  cmd->add_flag("--penalize-intercepts", d.penalize_intercepts,
                "Include intercept columns in the ridge penalty");
  cmd->add_option("--discrete-x-threshold", d.discrete_x_threshold,
                  "Switch to an indicator treatment basis when the distinct "
                  "treatment rows are at most this many (0 disables)")
      ->capture_default_str();
  cmd->add_option("--penalties", d.penalties, "Penalty selection: auto or fixed")
      ->check(CLI::IsMember({"auto", "fixed"}))
      ->capture_default_str();
  cmd->add_option("--lambda0", d.lambda0, "Minimum-distance penalty (with --penalties fixed)");
  cmd->add_option("--lambda1", d.lambda1, "Outcome-stage penalty (with --penalties fixed)");
  cmd->add_option("--lambda2", d.lambda2, "Proxy-stage penalty (with --penalties fixed)");
  cmd->add_option("--lambda3", d.lambda3, "Treatment-stage penalty (with --penalties fixed)");
}

EstimatorConfig make_estimator_config(const DesignOptions& d) {
  EstimatorConfig cfg =
      d.saturated ? EstimatorConfig::saturated() : EstimatorConfig::power_series(d.degree);
  if (!d.saturated) {
    if (d.rho_degree >= 0) cfg.rho.max_total_degree = d.rho_degree;
    if (d.chi_degree >= 0) cfg.chi.max_total_degree = d.chi_degree;
    if (d.psi_degree >= 0) cfg.psi.max_total_degree = d.psi_degree;
    if (d.no_standardize) cfg.rho.standardize = cfg.chi.standardize = cfg.psi.standardize = false;
  }
  cfg.penalize_intercepts = d.penalize_intercepts;
  cfg.discrete_x_threshold = d.discrete_x_threshold;
  if (d.penalties == "fixed") {
    cfg.penalty_rule = PenaltyRule::fixed;
    cfg.lambda0 = d.lambda0;
    cfg.lambda1 = d.lambda1;
    cfg.lambda2 = d.lambda2;
    cfg.lambda3 = d.lambda3;
  }
  return cfg;
}

Json design_echo(const DesignOptions& d) {
  return Json{{"degree", d.degree},
              {"rho_degree", d.rho_degree},
              {"chi_degree", d.chi_degree},
              {"psi_degree", d.psi_degree},
              {"saturated", d.saturated},
              {"no_standardize", d.no_standardize},
              {"penalize_intercepts", d.penalize_intercepts},
              {"discrete_x_threshold", d.discrete_x_threshold},
              {"penalties", d.penalties},
              {"lambda0", d.lambda0},
              {"lambda1", d.lambda1},
              {"lambda2", d.lambda2},
              {"lambda3", d.lambda3}};
}

Json fit_echo(const FittedEstimator& f) {
  return Json{{"n", f.n},
              {"lambda0", f.lambda0},
              {"lambda1", f.lambda1},
              {"lambda2", f.lambda2},
              {"lambda3", f.lambda3},
              {"theta_residual", f.theta_residual},
              {"notes", f.notes}};
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  const char* p = text.c_str();
  while (true) {
    char* end = nullptr;
    const double value = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument(what + ": cannot parse '" + text + "'");
    out.push_back(value);
    p = end;
    if (*p == '\0') break;
    if (*p != ',') throw std::invalid_argument(what + ": cannot parse '" + text + "'");
    ++p;
  }
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

//! Targets have the form x1:x2 with comma-separated components on each side.
TargetList parse_targets(const std::vector<std::string>& specs, int dx) {
  if (specs.empty())
    throw std::invalid_argument("at least one --target x1:x2 is required");
  TargetList targets;
  for (const std::string& spec : specs) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos || spec.find(':', colon + 1) != std::string::npos)
      throw std::invalid_argument("target: expected x1:x2, got '" + spec + "'");
    const Eigen::VectorXd x1 = to_vector(parse_numbers(spec.substr(0, colon), "target"));
    const Eigen::VectorXd x2 = to_vector(parse_numbers(spec.substr(colon + 1), "target"));
    if (x1.size() != dx || x2.size() != dx) {
      std::ostringstream msg;
      msg << "target '" << spec << "': treatment has " << dx << " component(s)";
      throw std::invalid_argument(msg.str());
    }
    targets.emplace_back(x1, x2);
  }
  return targets;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void emit_report(const Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
    std::cerr << "wrote " << out_path << "\n";
  }
}

Json report_header(const std::string& command, std::uint64_t seed) {
  return Json{{"tool", "proxctl"}, {"version", version}, {"command", command}, {"seed", seed}};
}

//! Options for the estimate and panel-estimate subcommands.
struct EstimateOptions {
  std::string data_path;
  std::vector<std::string> roles;
  std::vector<std::string> target_specs;
  DesignOptions design;
  int bootstrap = 0;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::string out_path;
  // panel only
  int target_period = 0;  // 0 means: the last period
  bool with_outcomes = false;
};

void add_estimate_options(CLI::App* cmd, EstimateOptions& o) {
  cmd->add_option("--data", o.data_path, "Input CSV file")->required();
  cmd->add_option("--role", o.roles,
                  "Column role assignment column=role, repeatable; roles are "
                  "y, x:j, z:j, v:j, id, period")
      ->required();
  cmd->add_option("--target", o.target_specs,
                  "Evaluation pair x1:x2 (comma-separated components), "
                  "repeatable; use --target=1:-1 for negative values")
      ->required();
  add_design_options(cmd, o.design);
  cmd->add_option("--bootstrap", o.bootstrap,
                  "Bootstrap draws for standard errors and bands (0 = point "
                  "estimates only)")
      ->capture_default_str();
  cmd->add_option("--level", o.level, "Confidence level for bands")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Top-level random seed")->capture_default_str();
  cmd->add_option("--out", o.out_path, "Report file (default: standard output)");
}

Json estimate_body(const Dataset& data, const EstimateOptions& o, Json&& report) {
  const EstimatorConfig cfg = make_estimator_config(o.design);
  const TargetList targets = parse_targets(o.target_specs, data.dx());

  const FittedEstimator fitted = fit(data, cfg);
  std::vector<std::string> warnings;
  Eigen::VectorXd points(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t)
    points(t) = casf(fitted, targets[t].first, targets[t].second, &warnings);

  report["config"]["data"] = o.data_path;
  report["config"]["roles"] = o.roles;
  report["config"]["targets"] = o.target_specs;
  report["config"]["design"] = design_echo(o.design);
  report["config"]["bootstrap"] = o.bootstrap;
  report["config"]["level"] = o.level;
  report["fit"] = fit_echo(fitted);

  Json estimates = Json::array();
  if (o.bootstrap > 0) {
    BootstrapConfig bcfg;
    bcfg.draws = o.bootstrap;
    bcfg.level = o.level;
    bcfg.seed = o.seed;
    const UniformBands bands = uniform_bands(data, cfg, targets, bcfg);
    for (std::size_t t = 0; t < targets.size(); ++t)
      estimates.push_back(Json{{"x1", vector_json(targets[t].first)},
                               {"x2", vector_json(targets[t].second)},
                               {"estimate", points(t)},
                               {"se", bands.se(t)},
                               {"lo", bands.lo(t)},
                               {"hi", bands.hi(t)}});
    report["bands"] = Json{{"critical", bands.critical},
                           {"requested", bands.requested},
                           {"discarded", bands.discarded},
                           {"caveat", bands.caveat}};
  } else {
    for (std::size_t t = 0; t < targets.size(); ++t)
      estimates.push_back(Json{{"x1", vector_json(targets[t].first)},
                               {"x2", vector_json(targets[t].second)},
                               {"estimate", points(t)}});
  }
  report["estimates"] = std::move(estimates);
  report["warnings"] = warnings;
  return std::move(report);
}

int run_estimate(const EstimateOptions& o) {
  const LoadedData loaded = load_csv(o.data_path, o.roles);
  if (loaded.is_panel)
    throw std::invalid_argument(
        "estimate: the role map describes a panel; use panel-estimate");
  emit_report(estimate_body(loaded.data, o, report_header("estimate", o.seed)), o.out_path);
  return 0;
}

Json column_ref_json(const std::vector<ColumnRef>& refs) {
  Json out = Json::array();
  for (const ColumnRef& ref : refs) {
    std::ostringstream name;
    if (ref.outcome)
      name << "y:" << ref.period;
    else
      name << "x:" << ref.period << "." << (ref.var + 1);
    out.push_back(name.str());
  }
  return out;
}

int run_panel_estimate(const EstimateOptions& o) {
  const LoadedData loaded = load_csv(o.data_path, o.roles);
  if (!loaded.is_panel)
    throw std::invalid_argument(
        "panel-estimate: the role map lacks id and period; use estimate");
  const PanelDataset& panel = loaded.panel;
  const int target = o.target_period > 0 ? o.target_period : panel.periods();
  const ProxySplit split = o.with_outcomes ? split_with_outcomes(panel, target)
                                           : split_predetermined(panel, target);
  const OrderConditionReport order =
      order_condition(0, target, panel.dx(), o.with_outcomes);

  Json report = estimate_body(split.data, o, report_header("panel-estimate", o.seed));
  report["config"]["target_period"] = target;
  report["config"]["with_outcomes"] = o.with_outcomes;
  report["split"] = Json{{"units", panel.n()},
                         {"periods", panel.periods()},
                         {"target_period", target},
                         {"v_columns", column_ref_json(split.v_columns)},
                         {"z_columns", column_ref_json(split.z_columns)},
                         {"shared_columns", column_ref_json(split.shared_columns)},
                         {"max_latent_dim", order.max_latent_dim}};
  emit_report(report, o.out_path);
  return 0;
}

struct SimulateOptions {
  GaussianLinearDGP dgp;
  std::vector<int> sizes{400, 1600, 6400};
  int reps = 100;
  std::uint64_t seed = 1;
  int degree = 2;
  double x1 = 1.0;
  double x2 = -1.0;
  bool no_naive = false;
  std::string out_path;
};

void add_simulate_options(CLI::App* cmd, SimulateOptions& o) {
  cmd->add_option("--b0", o.dgp.b0, "Outcome intercept")->capture_default_str();
  cmd->add_option("--b1", o.dgp.b1, "Treatment coefficient")->capture_default_str();
  cmd->add_option("--b2", o.dgp.b2, "Confounder coefficient")->capture_default_str();
  cmd->add_option("--alpha", o.dgp.alpha, "Confounder-to-treatment loading")
      ->capture_default_str();
  cmd->add_option("--sigma-v", o.dgp.sigma_v, "Outcome-side proxy noise sd")
      ->capture_default_str();
  cmd->add_option("--sigma-z", o.dgp.sigma_z, "Treatment-side proxy noise sd")
      ->capture_default_str();
  cmd->add_option("--sigma-y", o.dgp.sigma_y, "Outcome noise sd")->capture_default_str();
  cmd->add_option("--sizes", o.sizes, "Sample sizes, repeatable")->capture_default_str();
  cmd->add_option("--reps", o.reps, "Replications per sample size")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Top-level random seed")->capture_default_str();
  cmd->add_option("--degree", o.degree, "Polynomial degree for every basis")
      ->capture_default_str();
  cmd->add_option("--x1", o.x1, "Counterfactual treatment")->capture_default_str();
  cmd->add_option("--x2", o.x2, "Conditioning treatment")->capture_default_str();
  cmd->add_flag("--no-naive", o.no_naive, "Skip the perfect-controls comparator");
  cmd->add_option("--out", o.out_path, "Report file (default: standard output)");
}

int run_simulate(const SimulateOptions& o) {
  MonteCarloConfig mc;
  mc.sample_sizes = o.sizes;
  mc.replications = o.reps;
  mc.seed = o.seed;
  mc.x1 = o.x1;
  mc.x2 = o.x2;
  mc.include_naive = !o.no_naive;
  const MonteCarloReport result =
      monte_carlo(o.dgp, EstimatorConfig::power_series(o.degree), mc);

  Json report = report_header("simulate", o.seed);
  report["config"] = Json{{"b0", o.dgp.b0},
                          {"b1", o.dgp.b1},
                          {"b2", o.dgp.b2},
                          {"alpha", o.dgp.alpha},
                          {"sigma_v", o.dgp.sigma_v},
                          {"sigma_z", o.dgp.sigma_z},
                          {"sigma_y", o.dgp.sigma_y},
                          {"sizes", o.sizes},
                          {"reps", o.reps},
                          {"degree", o.degree},
                          {"x1", o.x1},
                          {"x2", o.x2},
                          {"naive", !o.no_naive}};
  Json cells = Json::array();
  for (const MonteCarloCell& cell : result.cells) {
    Json entry{{"n", cell.n},
               {"truth", cell.truth},
               {"bias", cell.bias},
               {"variance", cell.variance},
               {"mse", cell.mse},
               {"median_abs_error", cell.median_abs_error},
               {"estimates", cell.estimates}};
    if (!o.no_naive) {
      entry["naive_median_abs_error"] = cell.naive_median_abs_error;
      entry["naive_estimates"] = cell.naive_estimates;
    }
    cells.push_back(std::move(entry));
  }
  report["cells"] = std::move(cells);
  emit_report(report, o.out_path);
  return 0;
}

struct OracleOptions {
  int models = 100;
  std::uint64_t seed = 1;
  int gamma_draws = 20;
  int phi_draws = 20;
  bool skip_picard = false;
  double tolerance = 1e-8;
  std::string out_path;
};

void add_oracle_options(CLI::App* cmd, OracleOptions& o) {
  cmd->add_option("--models", o.models, "Random models to test")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Top-level random seed")->capture_default_str();
  cmd->add_option("--gamma-draws", o.gamma_draws,
                  "Random outcome-bridge candidates per model for the "
                  "stability inequality")
      ->capture_default_str();
  cmd->add_option("--phi-draws", o.phi_draws,
                  "Random ratio-bridge candidates per model for the dual "
                  "inequality")
      ->capture_default_str();
  cmd->add_flag("--skip-picard", o.skip_picard, "Skip the Picard-constant consistency check");
  cmd->add_option("--tolerance", o.tolerance, "Maximum allowed deviation")
      ->capture_default_str();
  cmd->add_option("--out", o.out_path, "Report file (default: standard output)");
}

int run_oracle_suite(const OracleOptions& o) {
  OracleBatteryConfig cfg;
  cfg.models = o.models;
  cfg.seed = o.seed;
  cfg.gamma_draws = o.gamma_draws;
  cfg.phi_draws = o.phi_draws;
  cfg.check_picard = !o.skip_picard;
  const OracleBatteryReport result = run_oracle_battery(cfg);

  const bool pass = result.max_gamma_dev < o.tolerance && result.max_phi_dev < o.tolerance &&
                    (o.skip_picard || result.max_picard_dev < o.tolerance) &&
                    result.inequality_failures == 0;
  Json report = report_header("oracle-suite", o.seed);
  report["config"] = Json{{"models", o.models},
                          {"gamma_draws", o.gamma_draws},
                          {"phi_draws", o.phi_draws},
                          {"check_picard", !o.skip_picard},
                          {"tolerance", o.tolerance}};
  report["results"] = Json{{"models", result.models},
                           {"redraws", result.redraws},
                           {"max_gamma_dev", result.max_gamma_dev},
                           {"max_phi_dev", result.max_phi_dev},
                           {"max_picard_dev", result.max_picard_dev},
                           {"inequality_checks", result.inequality_checks},
                           {"inequality_failures", result.inequality_failures}};
  report["pass"] = pass;
  emit_report(report, o.out_path);
  std::cerr << "oracle battery " << (pass ? "passed" : "FAILED") << " in "
            << result.seconds << " s\n";
  if (!pass) throw NumericError("oracle-suite: battery failed; see the report");
  return 0;
}

struct BandsOptions {
  EstimateOptions base;  // target_specs unused; grid drives evaluation
  std::string curve = "diagonal";
  double scale = 1.1;
  int grid_points = 100;
  double grid_lo = 0.10;
  double grid_hi = 0.90;
  std::string plot_path;
  std::string report_path;
};

void add_bands_options(CLI::App* cmd, BandsOptions& o) {
  o.base.bootstrap = 200;
  cmd->add_option("--data", o.base.data_path, "Input CSV file")->required();
  cmd->add_option("--role", o.base.roles,
                  "Column role assignment column=role, repeatable; roles are "
                  "y, x:j, z:j, v:j")
      ->required();
  add_design_options(cmd, o.base.design);
  cmd->add_option("--curve", o.curve,
                  "Curve along the treatment grid: diagonal evaluates at the "
                  "observed treatment, average the sample-averaged structural "
                  "function, scaled-effect the effect of scaling treatment")
      ->check(CLI::IsMember({"diagonal", "average", "scaled-effect"}))
      ->capture_default_str();
  cmd->add_option("--scale", o.scale, "Treatment multiplier for --curve scaled-effect")
      ->capture_default_str();
  cmd->add_option("--grid-points", o.grid_points, "Grid size")->capture_default_str();
  cmd->add_option("--grid-lo", o.grid_lo, "Lower grid quantile of the observed treatment")
      ->capture_default_str();
  cmd->add_option("--grid-hi", o.grid_hi, "Upper grid quantile of the observed treatment")
      ->capture_default_str();
  cmd->add_option("--bootstrap", o.base.bootstrap, "Bootstrap draws")->capture_default_str();
  cmd->add_option("--level", o.base.level, "Confidence level")->capture_default_str();
  cmd->add_option("--seed", o.base.seed, "Top-level random seed")->capture_default_str();
  cmd->add_option("--out", o.plot_path, "Plot data CSV (x, estimate, lo, hi)")->required();
  cmd->add_option("--report", o.report_path, "Optional report file");
}

int run_bands(const BandsOptions& o) {
  const LoadedData loaded = load_csv(o.base.data_path, o.base.roles);
  if (loaded.is_panel)
    throw std::invalid_argument("bands: panels are not supported; split first");
  const Dataset& data = loaded.data;
  if (data.dx() != 1)
    throw std::invalid_argument("bands: curves need a scalar treatment");
  if (o.base.bootstrap < 2)
    throw std::invalid_argument("bands: --bootstrap must be at least 2");

  const EstimatorConfig cfg = make_estimator_config(o.base.design);
  const FittedEstimator fitted = fit(data, cfg);
  const std::vector<double> grid =
      default_effect_grid(fitted, o.grid_points, o.grid_lo, o.grid_hi);

  const std::string curve = o.curve;
  const double scale = o.scale;
  const CurveFn curve_fn = [cfg, grid, curve, scale](const Dataset& sample) {
    const FittedEstimator f = fit(sample, cfg);
    Eigen::VectorXd out(grid.size());
    if (curve == "scaled-effect") {
      const std::vector<double> values = scaled_effect_curve(f, scale, grid);
      out = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
      return out;
    }
    Eigen::VectorXd point(1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      point(0) = grid[i];
      out(i) = curve == "average" ? asf_average(f, point) : casf(f, point, point);
    }
    return out;
  };

  BootstrapConfig bcfg;
  bcfg.draws = o.base.bootstrap;
  bcfg.level = o.base.level;
  bcfg.seed = o.base.seed;
  const UniformBands bands = uniform_bands_statistic(data, curve_fn, bcfg);

  std::vector<double> estimate(bands.estimate.data(), bands.estimate.data() + grid.size());
  std::vector<double> lo(bands.lo.data(), bands.lo.data() + grid.size());
  std::vector<double> hi(bands.hi.data(), bands.hi.data() + grid.size());
  write_plot_csv(o.plot_path, grid, estimate, lo, hi);
  std::cerr << "wrote " << o.plot_path << "\n";

  if (!o.report_path.empty()) {
    Json report = report_header("bands", o.base.seed);
    report["config"] = Json{{"data", o.base.data_path},
                            {"roles", o.base.roles},
                            {"design", design_echo(o.base.design)},
                            {"curve", o.curve},
                            {"scale", o.scale},
                            {"grid_points", o.grid_points},
                            {"grid_lo", o.grid_lo},
                            {"grid_hi", o.grid_hi},
                            {"bootstrap", o.base.bootstrap},
                            {"level", o.base.level}};
    report["fit"] = fit_echo(fitted);
    report["bands"] = Json{{"critical", bands.critical},
                           {"requested", bands.requested},
                           {"discarded", bands.discarded},
                           {"caveat", bands.caveat},
                           {"plot", o.plot_path}};
    emit_report(report, o.report_path);
  }
  return 0;
}

int fail(const std::string& type, const std::string& message, int code) {
  const Json record{
      {"error", Json{{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cerr << record.dump() << "\n";
  return code;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  CLI::App app{"Causal inference with proxy controls"};
  app.set_version_flag("--version", version);
  app.set_config("--config", "", "Read options from a config file with one "
                                 "[subcommand] section per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  EstimateOptions est;
  CLI::App* est_cmd = app.add_subcommand(
      "estimate", "Fit the proxy-control estimator on a cross-sectional CSV");
  est_cmd->configurable();
  add_estimate_options(est_cmd, est);

  EstimateOptions pan;
  CLI::App* pan_cmd = app.add_subcommand(
      "panel-estimate", "Split a balanced panel into proxies, then estimate");
  pan_cmd->configurable();
  add_estimate_options(pan_cmd, pan);
  pan_cmd->add_option("--target-period", pan.target_period,
                      "Period whose treatment effect is estimated (default: last)");
  pan_cmd->add_flag("--with-outcomes", pan.with_outcomes,
                    "Also recruit past outcomes as proxies");

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Replication study against the closed-form linear Gaussian design");
  sim_cmd->configurable();
  add_simulate_options(sim_cmd, sim);

  OracleOptions ora;
  CLI::App* ora_cmd = app.add_subcommand(
      "oracle-suite", "Exact-identification battery on random finite-support models");
  ora_cmd->configurable();
  add_oracle_options(ora_cmd, ora);

  BandsOptions ban;
  CLI::App* ban_cmd = app.add_subcommand(
      "bands", "Uniform confidence bands along a treatment grid, emitted as plot data");
  ban_cmd->configurable();
  add_bands_options(ban_cmd, ban);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    return fail("UsageError", e.what(), 1);
  }

  try {
    if (app.got_subcommand(est_cmd)) return run_estimate(est);
    if (app.got_subcommand(pan_cmd)) return run_panel_estimate(pan);
    if (app.got_subcommand(sim_cmd)) return run_simulate(sim);
    if (app.got_subcommand(ora_cmd)) return run_oracle_suite(ora);
    if (app.got_subcommand(ban_cmd)) return run_bands(ban);
    return fail("UsageError", "no subcommand given", 1);
  } catch (const SupportError& e) {
    return fail("SupportError", e.what(), 2);
  } catch (const DataError& e) {
    return fail("DataError", e.what(), 2);
  } catch (const SingularityError& e) {
    return fail("SingularityError", e.what(), 3);
  } catch (const IdentificationError& e) {
    return fail("IdentificationError", e.what(), 3);
  } catch (const AbsoluteContinuityError& e) {
    return fail("AbsoluteContinuityError", e.what(), 3);
  } catch (const OperatorRangeError& e) {
    return fail("OperatorRangeError", e.what(), 3);
  } catch (const BootstrapError& e) {
    return fail("BootstrapError", e.what(), 3);
  } catch (const NumericError& e) {
    return fail("NumericError", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    return fail("UsageError", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 3);
  }
}

}  // namespace proxctl
