// tspdim command line: sampling, estimation, calibration, risk sweeps and the
// numerical checks. Exit codes: 0 ok, 1 other error or failed check,
// 2 invalid config, 3 calibration failure, 4 infeasible construction.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tspdim/tspdim.hpp"

using namespace tspdim;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  cmd->add_option("--seed", c.seed, "master seed");
  auto* opt = cmd->add_option("--config", c.config, "JSON config file");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output directory");
}

std::string out_path(const Common& c, const std::string& file) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / file).string();
}

void report(const json& j, const Common& c, const std::string& file) {
  write_json_file(out_path(c, file), j);
  std::cout << j.dump(2) << '\n';
}

// Parses and returns a JSON field, mapping type errors to InvalidArgument.
template <class T>
T field(const json& j, const char* key, T fallback) {
  try {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

json estimate_to_json(const DimensionEstimate& e) {
  json stat = json::object(), th = json::object();
  for (const auto& [d, v] : e.statistic) stat[std::to_string(d)] = double_to_json(v);
  for (const auto& [d, v] : e.thresholds) th[std::to_string(d)] = double_to_json(v);
  return {{"d_hat", e.d_hat}, {"statistic", stat}, {"thresholds", th}, {"exact", e.exact},
          {"exhausted", e.exhausted}, {"uncertified", e.uncertified}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TSP-path intrinsic dimension estimation and its synthetic checks"};
  app.require_subcommand(1);

  // sample
  Common sample_c;
  std::size_t sample_n = 100;
  auto* sample_cmd = app.add_subcommand("sample", "draw a point cloud from a sampler spec");
  add_common(sample_cmd, sample_c, true);
  sample_cmd->add_option("--n", sample_n, "number of points")->check(CLI::PositiveNumber);

  // estimate
  Common est_c;
  std::string est_cloud, est_mode = "general";
  int est_d1 = 1, est_d2 = 2;
  double est_K = 1.0;
  auto* est_cmd = app.add_subcommand("estimate", "estimate the dimension of a point cloud file");
  add_common(est_cmd, est_c, true);
  est_cmd->add_option("--cloud", est_cloud, "point cloud CSV")->required();
  est_cmd->add_option("--mode", est_mode, "binary or general")->check(CLI::IsMember({"binary", "general"}));
  est_cmd->add_option("--d1", est_d1);
  est_cmd->add_option("--d2", est_d2);
  est_cmd->add_option("--K", est_K, "cube half-width of the cloud");

  // calibrate
  Common cal_c;
  auto* cal_cmd = app.add_subcommand("calibrate", "calibrate thresholds on reference samplers");
  add_common(cal_cmd, cal_c, true);

  // risk-sweep
  Common risk_c;
  auto* risk_cmd = app.add_subcommand("risk-sweep", "run a panel risk sweep over n");
  add_common(risk_cmd, risk_c, true);

  // cdf-exponent
  Common cdf_c;
  int cdf_d1 = 1;
  std::size_t cdf_pairs = 100000, cdf_boot = 200;
  auto* cdf_cmd = app.add_subcommand("cdf-exponent", "small-y slope of the cdf of ||X - X'||^d1");
  add_common(cdf_cmd, cdf_c, true);
  cdf_cmd->add_option("--d1", cdf_d1);
  cdf_cmd->add_option("--pairs", cdf_pairs);
  cdf_cmd->add_option("--bootstrap", cdf_boot);

  // lecam-affinity
  Common lc_c;
  auto* lc_cmd = app.add_subcommand("lecam-affinity", "brute-force affinity of the two-point zigzag problem");
  add_common(lc_cmd, lc_c, false);

  // hilbert-check
  Common hc_c;
  int hc_dim = 2, hc_depth = 8;
  std::size_t hc_pairs = 100000;
  double hc_r = 1.0;
  auto* hc_cmd = app.add_subcommand("hilbert-check", "Hoelder-1/d ratio of the space-filling curve on random pairs");
  add_common(hc_cmd, hc_c, false);
  hc_cmd->add_option("--dim", hc_dim);
  hc_cmd->add_option("--depth", hc_depth);
  hc_cmd->add_option("--pairs", hc_pairs);
  hc_cmd->add_option("--radius", hc_r);

  // bounds-table
  Common bt_c;
  int bt_d1 = 1, bt_d2 = 2, bt_nmax = 100;
  auto* bt_cmd = app.add_subcommand("bounds-table", "log risk bounds for n = 1..n_max");
  add_common(bt_cmd, bt_c, false);
  bt_cmd->add_option("--d1", bt_d1);
  bt_cmd->add_option("--d2", bt_d2);
  bt_cmd->add_option("--n-max", bt_nmax)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample_cmd) {
      const auto spec = sampler_from_json(read_json_file(sample_c.config));
      const auto cloud = sample(spec, sample_n, Seed{sample_c.seed});
      save_point_cloud(out_path(sample_c, "cloud.csv"), cloud);
      std::cout << "wrote " << cloud.size() << " points of " << spec.name() << '\n';
    } else if (*est_cmd) {
      const auto cfg = estimator_config_from_json(read_json_file(est_c.config));
      const auto cloud = load_point_cloud(est_cloud, est_K);
      const auto e = est_mode == "binary" ? estimate_binary(cloud, est_d1, est_d2, cfg, Seed{est_c.seed})
                                          : estimate_general(cloud, cfg, Seed{est_c.seed});
      report(estimate_to_json(e), est_c, "estimate.json");
    } else if (*cal_cmd) {
      const auto j = read_json_file(cal_c.config);
      if (!j.contains("params") || !j.contains("references")) throw InvalidArgument("calibrate: need 'params' and 'references'");
      const auto params = params_from_json(j.at("params"));
      std::map<int, SamplerSpec> refs;
      for (const auto& [key, v] : j.at("references").items()) refs.emplace(static_cast<int>(parse_int(key)), sampler_from_json(v));
      const auto cfg = calibrate_thresholds(params, refs, field(j, "n_values", std::vector<std::size_t>{}),
                                            field(j, "trials", std::size_t{100}), field(j, "safety", 1.5), Seed{cal_c.seed});
      report(to_json(cfg), cal_c, "estimator.json");
    } else if (*risk_cmd) {
      auto cfg = experiment_from_json(read_json_file(risk_c.config));
      if (risk_cmd->count("--seed")) cfg.seed = Seed{risk_c.seed};
      const auto curve = run_risk_sweep(cfg);
      emit_report(curve, risk_c.out);
      write_risk_csv(std::cout, curve);
    } else if (*cdf_cmd) {
      const auto spec = sampler_from_json(read_json_file(cdf_c.config));
      const auto r = check_cdf_exponent(spec, cdf_d1, cdf_pairs, Seed{cdf_c.seed}, cdf_boot);
      report({{"sampler", spec.name()}, {"d1", cdf_d1}, {"pairs", cdf_pairs}, {"slope", r.slope}, {"ci_lo", r.ci_lo},
              {"ci_hi", r.ci_hi}, {"y_lo", r.y_lo}, {"y_hi", r.y_hi}, {"points_in_fit", r.points_in_fit}},
             cdf_c, "cdf_exponent.json");
    } else if (*lc_cmd) {
      const json j = lc_c.config.empty() ? json::object() : read_json_file(lc_c.config);
      LeCamInstance inst;
      inst.n = field(j, "n", std::size_t{1});
      inst.params = ZigzagParams::make(1, field(j, "d2", 2), inst.n, field(j, "K_I", 1.0), field(j, "tau_l", 0.25));
      inst.mixture_draws = field(j, "mixture_draws", inst.mixture_draws);
      const auto model = field(j, "model", std::string("zigzag_tube"));
      if (model == "uniform_cube") inst.model = LeCamInstance::Q1Model::uniform_cube;
      else if (model != "zigzag_tube") throw InvalidArgument("lecam-affinity: unknown model '" + model + "'");
      const auto r = affinity_bruteforce(inst, Seed{lc_c.seed});
      report({{"n", inst.n}, {"model", model}, {"affinity", r.affinity}, {"std_error", r.std_error}, {"draws", r.draws},
              {"cells", r.cells}, {"support", r.support}, {"outside_mass", r.outside_mass}, {"epsilon", r.epsilon},
              {"ratio_floor", r.ratio_floor}, {"region_volume", r.region_volume}, {"bound", r.bound}, {"passes", r.passes}},
             lc_c, "lecam_affinity.json");
    } else if (*hc_cmd) {
      const SpaceFillingCurve curve(hc_dim, hc_depth, hc_r);
      const double bound = 4.0 * hc_r * std::sqrt(hc_dim + 3.0);
      Rng rng = make_rng(Seed{hc_c.seed});
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double worst = 0.0;
      std::size_t violations = 0;
      for (std::size_t i = 0; i < hc_pairs; ++i) {
        const double s = u(rng), t = u(rng);
        if (s == t) continue;
        const Point a = curve.eval(s), b = curve.eval(t);
        const double ratio = distance(a, b) / std::pow(std::abs(s - t), 1.0 / hc_dim);
        worst = std::max(worst, ratio);
        violations += ratio > bound;
      }
      report({{"dim", hc_dim}, {"depth", hc_depth}, {"pairs", hc_pairs}, {"max_ratio", worst}, {"bound", bound},
              {"violations", violations}},
             hc_c, "hilbert_check.json");
      if (violations) return 1;
    } else if (*bt_cmd) {
      auto params = RegularityParams::defaults(bt_d2, 1.0, 1.0, 1.0);
      BoundConstants k;
      if (!bt_c.config.empty()) {
        const auto j = read_json_file(bt_c.config);
        if (j.contains("params")) params = params_from_json(j.at("params"));
        if (j.contains("constants")) {
          const auto& c = j.at("constants");
          k.C_lower = field(c, "C_lower", 1.0);
          k.C_upper = field(c, "C_upper", 1.0);
          k.C_binary_lower = field(c, "C_binary_lower", 1.0);
          k.C_binary_upper = field(c, "C_binary_upper", 1.0);
        }
      }
      if (bt_d1 < 1 || bt_d2 <= bt_d1 || bt_d2 > params.m) throw InvalidArgument("bounds-table: need 1 <= d1 < d2 <= m");
      std::ofstream os(out_path(bt_c, "bounds.csv"), std::ios::binary);
      write_csv_row(os, {"n", "log_binary_lower", "log_binary_upper", "log_general_lower", "log_general_upper"});
      for (int n = 1; n <= bt_nmax; ++n) {
        const double x = n;
        const double gu = params.m >= 2 ? log_bound_upper_general(x, params, k) : std::nan("");
        write_csv_row(os, {std::to_string(n), format_double(log_bound_binary_lower(x, bt_d1, bt_d2, params, k)),
                           format_double(log_bound_binary_upper(x, bt_d1, bt_d2, params, k)),
                           format_double(log_bound_lower_general(x, params, k)), format_double(gu)});
      }
      std::cout << "wrote " << bt_nmax << " rows\n";
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration failure: " << e.what() << '\n';
    return 3;
  } catch (const InfeasibleConstruction& e) {
    std::cerr << "infeasible construction: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
