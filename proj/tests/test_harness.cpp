#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tspdim/harness.hpp"

using namespace tspdim;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

ExperimentConfig segment_vs_square(std::vector<std::size_t> ns, std::size_t trials, bool with_square = true) {
  ExperimentConfig cfg;
  cfg.name = "unit";
  cfg.seed = Seed{2};
  cfg.class_params = RegularityParams::defaults(2, 1.0, 1.0, 1.0);
  const auto seg = uniform_cube_spec(1, cfg.class_params);
  cfg.panel.push_back({seg, 1});
  if (with_square) cfg.panel.push_back({uniform_cube_spec(2, cfg.class_params), 2});
  cfg.n_grid = std::move(ns);
  cfg.trials = trials;
  cfg.calibration = CalibrationDirective{{{1, seg}}, 50, 1.5, {}};
  return cfg;
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tspdim_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("Wilson interval contains the estimate and shrinks with trials") {
  double prev_width = 2.0;
  for (std::size_t trials : {10u, 100u, 1000u, 10000u}) {
    const std::size_t errors = trials / 5;
    const auto ci = wilson_interval(errors, trials);
    CHECK(ci.lo <= 0.2);
    CHECK(ci.hi >= 0.2);
    CHECK(ci.hi - ci.lo < prev_width);
    prev_width = ci.hi - ci.lo;
  }
  CHECK(wilson_interval(0, 50).lo == 0.0);
  CHECK(wilson_interval(50, 50).hi == 1.0);
  CHECK_THROWS_AS(wilson_interval(3, 2), InvalidArgument);
}

TEST_CASE("risk sweep on segment-only data has zero risk") {
  const auto curve = run_risk_sweep(segment_vs_square({5, 20, 60}, 60, false));
  REQUIRE(curve.rows.size() == 3);
  for (const auto& r : curve.rows) {
    CHECK(r.errors == 0);
    CHECK(r.risk == 0.0);
  }
}

TEST_CASE("single-trial risk is 0 or 1") {
  const auto curve = run_risk_sweep(segment_vs_square({4, 8}, 1));
  for (const auto& r : curve.rows) CHECK((r.risk == 0.0 || r.risk == 1.0));
}

TEST_CASE("risk sweep rows, aggregation and determinism") {
  const auto cfg = segment_vs_square({5, 10, 20}, 80);
  const auto a = run_risk_sweep(cfg), b = run_risk_sweep(cfg);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& r = a.rows[i];
    CHECK(r.errors == b.rows[i].errors);
    CHECK(r.errors <= r.trials);
    CHECK(r.risk == double(r.errors) / double(r.trials));
    CHECK(r.ci.lo <= r.risk);
    CHECK(r.ci.hi >= r.risk);
    std::size_t worst = 0;
    for (const auto& s : r.per_sampler) worst = std::max(worst, s.errors);
    CHECK(r.errors == worst);
    if (i) CHECK(r.n > a.rows[i - 1].n);
    CHECK(r.log_bound_lower <= r.log_bound_upper);
  }
  CHECK(a.rows.front().risk >= a.rows.back().risk);
  CHECK(a.config_snapshot.dump() == b.config_snapshot.dump());
}

TEST_CASE("experiment config validation") {
  auto cfg = segment_vs_square({10, 5}, 10);
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = segment_vs_square({5, 10}, 0);
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = segment_vs_square({5, 10}, 10);
  cfg.estimator = EstimatorConfig::user_supplied(2, {{1, 3.0}, {2, kInf}});
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = segment_vs_square({5, 10}, 10);
  cfg.calibration->references.clear();
  CHECK_THROWS_AS(run_risk_sweep(cfg), CalibrationError);
}

TEST_CASE("experiment config JSON round trip") {
  auto cfg = segment_vs_square({5, 10}, 7);
  cfg.panel.push_back({zigzag_spec(1, 2, 3, RegularityParams::defaults(2, 1.0, 0.25, 0.25)), 1});
  const auto j = to_json(cfg);
  const auto back = experiment_from_json(json::parse(j.dump()));
  CHECK(to_json(back).dump() == j.dump());
  CHECK(back.panel.size() == 3);
  CHECK(back.panel[2].spec.name() == cfg.panel[2].spec.name());

  const auto est = EstimatorConfig::user_supplied(2, {{1, 2.5}, {2, kInf}});
  const auto est_back = estimator_config_from_json(json::parse(to_json(est).dump()));
  CHECK(est_back.threshold(1) == 2.5);
  CHECK(std::isinf(est_back.threshold(2)));
}

TEST_CASE("cdf exponent on the square") {
  const auto spec = uniform_cube_spec(2, RegularityParams::defaults(2));
  const auto r = check_cdf_exponent(spec, 1, 20000, Seed{3}, 50);
  CHECK(r.slope == Approx(2.0).margin(0.3));
  CHECK(r.ci_lo <= r.slope);
  CHECK(r.ci_hi >= r.slope);
  CHECK(r.y_lo == Approx(r.y_hi / 10.0));
  CHECK_THROWS_AS(check_cdf_exponent(spec, 1, 100, Seed{3}), InvalidArgument);
  CHECK_THROWS_AS(check_cdf_exponent(spec, 0, 5000, Seed{3}), InvalidArgument);
}

TEST_CASE("risk CSV round trip") {
  const auto curve = run_risk_sweep(segment_vs_square({5, 10}, 20));
  std::stringstream ss;
  write_risk_csv(ss, curve);
  const auto rows = read_risk_csv(ss);
  REQUIRE(rows.size() == curve.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == curve.rows[i].n);
    CHECK(rows[i].errors == curve.rows[i].errors);
    CHECK(rows[i].risk == curve.rows[i].risk);
    CHECK(rows[i].ci.lo == curve.rows[i].ci.lo);
    CHECK(rows[i].ci.hi == curve.rows[i].ci.hi);
    CHECK(rows[i].log_bound_lower == curve.rows[i].log_bound_lower);
    CHECK(rows[i].log_bound_upper == curve.rows[i].log_bound_upper);
  }
}

TEST_CASE("empty curve gives a header-only CSV") {
  std::stringstream ss;
  write_risk_csv(ss, RiskCurve{});
  CHECK(ss.str() == "n,trials,errors,risk,ci_lo,ci_hi,log_bound_lower,log_bound_upper\r\n");
  CHECK(read_risk_csv(ss).empty());
}

TEST_CASE("log-bound columns stay finite for large n") {
  auto cfg = segment_vs_square({10, 100, 1000, 10000}, 1);
  for (std::size_t n : cfg.n_grid) {
    const auto [lo, hi] = log_bounds(cfg, n);
    CHECK(std::isfinite(lo));
    CHECK(std::isfinite(hi));
  }
}

TEST_CASE("emit_report writes the CSV files and a config snapshot") {
  const auto dir = temp_dir("report");
  const auto curve = run_risk_sweep(segment_vs_square({5}, 5));
  emit_report(curve, dir.string());
  CHECK(fs::exists(dir / "risk.csv"));
  CHECK(fs::exists(dir / "panel.csv"));
  const auto snap = read_json_file((dir / "config.json").string());
  CHECK(snap.at("risk_label") == "panel risk");
  CHECK(snap.contains("resolved_estimator"));
}

TEST_CASE("CSV fields are quoted per RFC 4180") {
  std::stringstream ss;
  write_csv_row(ss, {"plain", "a,b", "say \"hi\"", "line\nbreak"});
  std::vector<std::string> f;
  REQUIRE(read_csv_row(ss, f));
  CHECK(f == std::vector<std::string>{"plain", "a,b", "say \"hi\"", "line\nbreak"});
}

TEST_CASE("point cloud file round trip is bit exact") {
  const auto spec = zigzag_spec(1, 2, 3, RegularityParams::defaults(2, 1.0, 0.25, 0.25), {}, true);
  const auto c = sample(spec, 300, Seed{6});
  std::stringstream ss;
  write_point_cloud(ss, c);
  CHECK(ss.str().rfind("m=2,n=300,d_true=1\r\n", 0) == 0);
  const auto back = read_point_cloud(ss);
  CHECK(back.meta().true_dim == 1);
  REQUIRE(back.coords().size() == c.coords().size());
  CHECK(std::equal(c.coords().begin(), c.coords().end(), back.coords().begin()));

  std::stringstream unknown("m=1,n=2,d_true=?\n0.5\n-0.25\n");
  const auto u = read_point_cloud(unknown);
  CHECK_FALSE(u.meta().true_dim.has_value());
  std::stringstream bad_header("m=1,n=2\n0.5\n0.1\n");
  CHECK_THROWS_AS(read_point_cloud(bad_header), InvalidArgument);
  std::stringstream short_rows("m=1,n=3,d_true=1\n0.5\n0.1\n");
  CHECK_THROWS_AS(read_point_cloud(short_rows), InvalidArgument);
  std::stringstream bad_number("m=1,n=1,d_true=1\n0.5x\n");
  CHECK_THROWS_AS(read_point_cloud(bad_number), InvalidArgument);
}

TEST_CASE("command line exit codes") {
  const char* cli = std::getenv("TSPDIM_CLI");
  if (!cli) {
    WARN("TSPDIM_CLI not set; skipping CLI checks");
    return;
  }
  const auto dir = temp_dir("cli");
  auto run = [&](const std::string& args) {
    const int status = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto good = write("cube.json", R"({"kind":"uniform_cube","d":1,"params":{"m":2}})");
  CHECK(run("sample --config " + good + " --n 25 --seed 4 --out " + (dir / "s").string()) == 0);
  CHECK(fs::exists(dir / "s" / "cloud.csv"));
  CHECK(load_point_cloud((dir / "s" / "cloud.csv").string()).size() == 25);

  CHECK(run("sample --config " + write("bad.json", R"({"kind":"nope","params":{"m":2}})") + " --n 5 --out " + dir.string()) == 2);
  CHECK(run("sample --config " + write("broken.json", "{") + " --n 5 --out " + dir.string()) == 2);
  const auto infeasible = write("zz.json", R"({"kind":"zigzag","d2":2,"n_blocks":3,"params":{"m":2,"tau_g":0.75,"tau_l":0.75}})");
  CHECK(run("sample --config " + infeasible + " --n 5 --out " + dir.string()) == 4);
  const auto cal = write("cal.json", R"({"params":{"m":3},"references":{"1":{"kind":"uniform_cube","d":1,"params":{"m":3}}},"trials":2,"safety":1.5,"n_values":[5]})");
  CHECK(run("calibrate --config " + cal + " --out " + (dir / "c").string()) == 3);
  CHECK(run("bounds-table --n-max 20 --out " + (dir / "b").string()) == 0);
  CHECK(run("hilbert-check --dim 2 --depth 6 --pairs 2000 --out " + (dir / "h").string()) == 0);
}
