#pragma once

// Monte-Carlo experiment runner: panel risk sweeps over sample sizes with
// bound overlays, the small-distance cdf exponent check, and report files.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tspdim/bounds.hpp"
#include "tspdim/core_types.hpp"
#include "tspdim/estimator.hpp"
#include "tspdim/io.hpp"
#include "tspdim/manifolds.hpp"

namespace tspdim {

// ---------------------------------------------------------------------------
// Configuration

struct PanelEntry {
  SamplerSpec spec;
  int true_dim = 1;
};

struct CalibrationDirective {
  std::map<int, SamplerSpec> references;
  std::size_t trials = 100;
  double safety = 1.5;
  std::vector<std::size_t> n_values;  // empty = the experiment's n grid
};

struct ExperimentConfig {
  enum class Mode { binary, general };

  std::string name = "experiment";
  Seed seed{};
  Mode mode = Mode::binary;
  int d1 = 1, d2 = 2;                  // binary mode
  std::vector<PanelEntry> panel;
  std::vector<std::size_t> n_grid;
  std::size_t trials = 100;
  std::optional<EstimatorConfig> estimator;
  std::optional<CalibrationDirective> calibration;
  RegularityParams class_params;       // used for bound overlays
  BoundConstants constants;
  std::string output_dir = "out";

  int m() const { return class_params.m; }

  void validate() const {
    if (panel.empty()) throw InvalidArgument("experiment: sampler panel is empty");
    if (n_grid.empty()) throw InvalidArgument("experiment: n grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw InvalidArgument("experiment: n must be >= 1");
      if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("experiment: n grid must be strictly increasing");
    }
    if (trials < 1) throw InvalidArgument("experiment: trials must be >= 1");
    if (estimator.has_value() == calibration.has_value())
      throw InvalidArgument("experiment: give exactly one of an estimator config or a calibration directive");
    for (const auto& e : panel) {
      e.spec.validate();
      if (e.spec.ambient_dim() != m()) throw InvalidArgument("experiment: panel sampler not in R^m");
    }
    if (mode == Mode::binary) {
      if (d1 < 1 || d2 <= d1 || d2 > m()) throw InvalidArgument("experiment: need 1 <= d1 < d2 <= m");
      for (const auto& e : panel)
        if (e.true_dim != d1 && e.true_dim != d2) throw InvalidArgument("experiment: binary panel entries must have true dimension d1 or d2");
    }
    constants.validate();
  }
};

// ---------------------------------------------------------------------------
// Risk curve

struct Interval {
  double lo = 0.0, hi = 1.0;
};

// Wilson score interval for errors / trials at normal quantile z.
inline Interval wilson_interval(std::size_t errors, std::size_t trials, double z = 1.96) {
  if (trials == 0 || errors > trials) throw InvalidArgument("wilson: need 0 <= errors <= trials, trials >= 1");
  const double n = static_cast<double>(trials), p = static_cast<double>(errors) / n, z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct SamplerRisk {
  std::string sampler;
  int true_dim = 0;
  std::size_t errors = 0;
};

// One row per n. The reported errors are those of the worst sampler of the
// panel ("panel risk"); per-sampler counts are kept alongside.
struct RiskRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t errors = 0;
  double risk = 0.0;
  Interval ci;
  double log_bound_lower = 0.0;
  double log_bound_upper = 0.0;
  std::vector<SamplerRisk> per_sampler;
};

struct RiskCurve {
  std::string experiment;
  Seed seed{};
  std::vector<RiskRow> rows;
  json config_snapshot;
};

// ---------------------------------------------------------------------------
// JSON form of the experiment config

inline json to_json(const ExperimentConfig& c) {
  json panel = json::array();
  for (const auto& e : c.panel) panel.push_back({{"true_dim", e.true_dim}, {"spec", to_json(e.spec)}});
  json j = {{"name", c.name},
            {"seed", c.seed.value},
            {"panel", panel},
            {"n_grid", c.n_grid},
            {"trials", c.trials},
            {"class_params", to_json(c.class_params)},
            {"constants",
             {{"C_lower", c.constants.C_lower},
              {"C_upper", c.constants.C_upper},
              {"C_binary_upper", c.constants.C_binary_upper},
              {"C_binary_lower", c.constants.C_binary_lower}}},
            {"output_dir", c.output_dir}};
  if (c.mode == ExperimentConfig::Mode::binary) j["mode"] = {{"type", "binary"}, {"d1", c.d1}, {"d2", c.d2}};
  else j["mode"] = {{"type", "general"}};
  if (c.estimator) j["estimator"] = to_json(*c.estimator);
  if (c.calibration) {
    json refs = json::object();
    for (const auto& [d, s] : c.calibration->references) refs[std::to_string(d)] = to_json(s);
    j["calibration"] = {{"references", refs}, {"trials", c.calibration->trials}, {"safety", c.calibration->safety},
                        {"n_values", c.calibration->n_values}};
  }
  return j;
}

inline ExperimentConfig experiment_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.name = j.value("name", std::string("experiment"));
    c.seed = Seed{j.value("seed", std::uint64_t{0})};
    if (j.contains("mode")) {
      const auto& mo = j.at("mode");
      const auto type = mo.value("type", std::string("binary"));
      if (type == "binary") {
        c.mode = ExperimentConfig::Mode::binary;
        c.d1 = mo.value("d1", 1);
        c.d2 = mo.value("d2", 2);
      } else if (type == "general") {
        c.mode = ExperimentConfig::Mode::general;
      } else {
        throw InvalidArgument("experiment: unknown mode '" + type + "'");
      }
    }
    for (const auto& e : j.at("panel")) {
      PanelEntry pe{sampler_from_json(e.at("spec")), 0};
      pe.true_dim = e.value("true_dim", pe.spec.intrinsic_dim());
      c.panel.push_back(std::move(pe));
    }
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    c.trials = j.value("trials", std::size_t{100});
    c.class_params = j.contains("class_params") ? params_from_json(j.at("class_params")) : c.panel.at(0).spec.params;
    if (j.contains("constants")) {
      const auto& k = j.at("constants");
      c.constants.C_lower = k.value("C_lower", 1.0);
      c.constants.C_upper = k.value("C_upper", 1.0);
      c.constants.C_binary_upper = k.value("C_binary_upper", 1.0);
      c.constants.C_binary_lower = k.value("C_binary_lower", 1.0);
    }
    c.output_dir = j.value("output_dir", std::string("out"));
    if (j.contains("estimator")) c.estimator = estimator_config_from_json(j.at("estimator"));
    if (j.contains("calibration")) {
      const auto& cal = j.at("calibration");
      CalibrationDirective d;
      for (const auto& [key, v] : cal.at("references").items()) d.references.emplace(static_cast<int>(parse_int(key)), sampler_from_json(v));
      d.trials = cal.value("trials", std::size_t{100});
      d.safety = cal.value("safety", 1.5);
      d.n_values = cal.value("n_values", std::vector<std::size_t>{});
      c.calibration = std::move(d);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("experiment config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Runner

inline EstimatorConfig resolve_estimator(const ExperimentConfig& cfg) {
  if (cfg.estimator) return *cfg.estimator;
  const auto& d = *cfg.calibration;
  return calibrate_thresholds(cfg.class_params, d.references, d.n_values.empty() ? cfg.n_grid : d.n_values, d.trials,
                              d.safety, derive(cfg.seed, 0xCA11B));
}

inline std::pair<double, double> log_bounds(const ExperimentConfig& cfg, std::size_t n) {
  const double x = static_cast<double>(n);
  if (cfg.mode == ExperimentConfig::Mode::binary)
    return {log_bound_binary_lower(x, cfg.d1, cfg.d2, cfg.class_params, cfg.constants),
            log_bound_binary_upper(x, cfg.d1, cfg.d2, cfg.class_params, cfg.constants)};
  const double upper = cfg.m() >= 2 ? log_bound_upper_general(x, cfg.class_params, cfg.constants) : std::nan("");
  return {log_bound_lower_general(x, cfg.class_params, cfg.constants), upper};
}

// Trial (n index i, sampler j, trial t) uses seeds derived from
// (master, i, j, t) only, so the curve does not depend on execution order.
inline RiskCurve run_risk_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const EstimatorConfig est = resolve_estimator(cfg);
  RiskCurve curve;
  curve.experiment = cfg.name;
  curve.seed = cfg.seed;
  curve.config_snapshot = to_json(cfg);
  curve.config_snapshot["resolved_estimator"] = to_json(est);
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    RiskRow row;
    row.n = n;
    row.trials = cfg.trials;
    for (std::size_t j = 0; j < cfg.panel.size(); ++j) {
      const auto& entry = cfg.panel[j];
      SamplerRisk sr{entry.spec.name(), entry.true_dim, 0};
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const Seed s = derive(cfg.seed, 1, i, j, t);
        const PointCloud cloud = sample(entry.spec, n, derive(s, 0));
        const DimensionEstimate e = cfg.mode == ExperimentConfig::Mode::binary
                                        ? estimate_binary(cloud, cfg.d1, cfg.d2, est, derive(s, 1))
                                        : estimate_general(cloud, est, derive(s, 1));
        if (e.d_hat != entry.true_dim) ++sr.errors;
      }
      row.errors = std::max(row.errors, sr.errors);
      row.per_sampler.push_back(std::move(sr));
    }
    row.risk = static_cast<double>(row.errors) / static_cast<double>(row.trials);
    row.ci = wilson_interval(row.errors, row.trials);
    std::tie(row.log_bound_lower, row.log_bound_upper) = log_bounds(cfg, n);
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Conditional-cdf exponent

struct CdfExponent {
  double slope = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // percentile bootstrap, 95%
  double y_lo = 0.0, y_hi = 0.0;    // fit window
  std::size_t points_in_fit = 0;
};

inline constexpr double kCdfFitQuantile = 0.02;

namespace detail {

// Least-squares slope of log F against log y over y in [y_hi / 10, y_hi],
// y_hi the kCdfFitQuantile quantile; F(y_(i)) = (i + 1) / N on sorted y.
inline CdfExponent fit_cdf_slope(std::vector<double> y) {
  const std::size_t N = y.size();
  const auto q = static_cast<std::size_t>(std::ceil(kCdfFitQuantile * static_cast<double>(N)));
  if (q < 20) throw InvalidArgument("cdf exponent: too few pairs for the fit window");
  std::nth_element(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(q - 1), y.end());
  const double y_hi = y[q - 1];
  std::sort(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(q));
  const double y_lo = y_hi / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < q; ++i) {
    if (y[i] < y_lo || !(y[i] > 0.0)) continue;
    const double lx = std::log(y[i]), ly = std::log(static_cast<double>(i + 1) / static_cast<double>(N));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 10) throw InvalidArgument("cdf exponent: fewer than 10 points in the fit window");
  const double kk = static_cast<double>(k);
  CdfExponent out;
  out.slope = (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
  out.y_lo = y_lo;
  out.y_hi = y_hi;
  out.points_in_fit = k;
  return out;
}

}  // namespace detail

// Slope of the empirical cdf of ||X - X'||^{d1} at small y over n_pairs
// independent pairs from the sampler.
inline CdfExponent check_cdf_exponent(const SamplerSpec& spec, int d1, std::size_t n_pairs, Seed seed,
                                      std::size_t bootstrap = 200) {
  if (d1 < 1) throw InvalidArgument("cdf exponent: d1 must be >= 1");
  if (n_pairs < 1000) throw InvalidArgument("cdf exponent: need at least 1000 pairs");
  const PointCloud cloud = sample(spec, 2 * n_pairs, derive(seed, 0));
  std::vector<double> y(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) y[i] = power_distance(cloud.point(2 * i), cloud.point(2 * i + 1), d1);
  CdfExponent out = detail::fit_cdf_slope(y);
  if (bootstrap > 0) {
    Rng rng = make_rng(derive(seed, 1));
    std::uniform_int_distribution<std::size_t> pick(0, n_pairs - 1);
    std::vector<double> slopes, resample(n_pairs);
    for (std::size_t b = 0; b < bootstrap; ++b) {
      for (auto& v : resample) v = y[pick(rng)];
      slopes.push_back(detail::fit_cdf_slope(resample).slope);
    }
    std::sort(slopes.begin(), slopes.end());
    const auto at = [&](double p) {
      return slopes[std::min(slopes.size() - 1, static_cast<std::size_t>(p * static_cast<double>(slopes.size())))];
    };
    out.ci_lo = at(0.025);
    out.ci_hi = at(0.975);
  } else {
    out.ci_lo = out.ci_hi = out.slope;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline const std::vector<std::string>& risk_csv_header() {
  static const std::vector<std::string> h{"n", "trials", "errors", "risk", "ci_lo", "ci_hi", "log_bound_lower", "log_bound_upper"};
  return h;
}

inline void write_risk_csv(std::ostream& os, const RiskCurve& c) {
  write_csv_row(os, risk_csv_header());
  for (const auto& r : c.rows)
    write_csv_row(os, {std::to_string(r.n), std::to_string(r.trials), std::to_string(r.errors), format_double(r.risk),
                       format_double(r.ci.lo), format_double(r.ci.hi), format_double(r.log_bound_lower),
                       format_double(r.log_bound_upper)});
}

inline std::vector<RiskRow> read_risk_csv(std::istream& is) {
  std::vector<std::string> f;
  if (!read_csv_row(is, f) || f != risk_csv_header()) throw InvalidArgument("risk csv: bad header");
  std::vector<RiskRow> rows;
  while (read_csv_row(is, f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 8) throw InvalidArgument("risk csv: row with wrong field count");
    RiskRow r;
    r.n = static_cast<std::size_t>(parse_int(f[0]));
    r.trials = static_cast<std::size_t>(parse_int(f[1]));
    r.errors = static_cast<std::size_t>(parse_int(f[2]));
    r.risk = parse_double(f[3]);
    r.ci = {parse_double(f[4]), parse_double(f[5])};
    r.log_bound_lower = parse_double(f[6]);
    r.log_bound_upper = parse_double(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Per-sampler panel breakdown: n, sampler, true_dim, errors, trials.
inline void write_panel_csv(std::ostream& os, const RiskCurve& c) {
  write_csv_row(os, {"n", "sampler", "true_dim", "errors", "trials"});
  for (const auto& r : c.rows)
    for (const auto& s : r.per_sampler)
      write_csv_row(os, {std::to_string(r.n), s.sampler, std::to_string(s.true_dim), std::to_string(s.errors), std::to_string(r.trials)});
}

// Writes <dir>/risk.csv, <dir>/panel.csv and <dir>/config.json.
inline void emit_report(const RiskCurve& c, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* f) { return (std::filesystem::path(dir) / f).string(); };
  {
    std::ofstream os(path("risk.csv"), std::ios::binary);
    if (!os) throw Error("cannot write " + path("risk.csv"));
    write_risk_csv(os, c);
  }
  {
    std::ofstream os(path("panel.csv"), std::ios::binary);
    if (!os) throw Error("cannot write " + path("panel.csv"));
    write_panel_csv(os, c);
  }
  json snap = c.config_snapshot;
  snap["risk_label"] = "panel risk";
  write_json_file(path("config.json"), snap);
}

}  // namespace tspdim
