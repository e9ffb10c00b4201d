#include <catch_amalgamated.hpp>

#include "tspdim/estimator.hpp"

using namespace tspdim;
using Catch::Approx;

namespace {

RegularityParams params2() { return RegularityParams::defaults(2); }

SamplerSpec segment2() { return uniform_cube_spec(1, params2()); }
SamplerSpec square() { return uniform_cube_spec(2, params2()); }

EstimatorConfig segment_thresholds(std::vector<std::size_t> ns, double safety = 1.5) {
  return calibrate_thresholds(params2(), {{1, segment2()}}, std::move(ns), 100, safety, Seed{2024});
}

}  // namespace

TEST_CASE("binary estimate on a single point picks d1") {
  const auto cfg = EstimatorConfig::user_supplied(2, {{1, 1e-9}, {2, kInf}});
  const auto one = PointCloud::from_points({{0.2, 0.3}});
  const auto e = estimate_binary(one, 1, 2, cfg, Seed{0});
  CHECK(e.d_hat == 1);
  CHECK(e.statistic.at(1) == 0.0);
  CHECK(estimate_general(one, cfg, Seed{0}).d_hat == 1);
}

TEST_CASE("binary estimate never errs on segment data") {
  const auto cfg = segment_thresholds({50});
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto c = sample(segment2(), 50, derive(Seed{777}, s));
    CHECK(estimate_binary(c, 1, 2, cfg, Seed{s}).d_hat == 1);
  }
}

TEST_CASE("binary estimate detects square data") {
  const auto cfg = segment_thresholds({50});
  std::size_t right = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto c = sample(square(), 50, derive(Seed{888}, s));
    right += estimate_binary(c, 1, 2, cfg, Seed{s}).d_hat == 2;
  }
  CHECK(right >= 198);
}

TEST_CASE("binary estimate argument checks") {
  const auto cfg = EstimatorConfig::user_supplied(2, {{1, 1.0}, {2, kInf}});
  const auto c = sample(square(), 5, Seed{1});
  CHECK_THROWS_AS(estimate_binary(c, 2, 2, cfg, Seed{}), InvalidArgument);
  CHECK_THROWS_AS(estimate_binary(c, 1, 3, cfg, Seed{}), InvalidArgument);
  CHECK_THROWS_AS(estimate_binary(c, 0, 1, cfg, Seed{}), InvalidArgument);
}

TEST_CASE("general estimate on a curve and a plane in R^3") {
  const auto p3 = RegularityParams::defaults(3, 1.0, 1.0, 1.0);
  const auto circle = uniform_sphere_spec(1, 1.0, p3);
  const auto plane = uniform_cube_spec(2, p3);
  const auto cfg = calibrate_thresholds(p3, {{1, circle}, {2, plane}}, {50, 100}, 100, 1.5, Seed{5});
  CHECK(std::isinf(cfg.threshold(3)));
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto c = sample(circle, 50, derive(Seed{1}, s));
    const auto e = estimate_general(c, cfg, Seed{s});
    CHECK(e.d_hat == 1);
    CHECK_FALSE(e.exhausted);
  }
  std::size_t right = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto c = sample(plane, 100, derive(Seed{2}, s));
    const auto e = estimate_general(c, cfg, Seed{s});
    CHECK(e.d_hat <= 2);
    right += e.d_hat == 2;
  }
  CHECK(right >= 190);
}

TEST_CASE("general estimate falls back to m when no threshold fires") {
  const auto cfg = EstimatorConfig::user_supplied(2, {{1, 1e-6}, {2, 1e-6}});
  const auto c = sample(square(), 20, Seed{3});
  const auto e = estimate_general(c, cfg, Seed{0});
  CHECK(e.d_hat == 2);
  CHECK(e.exhausted);
  CHECK(e.statistic.size() == 2);
  for (const auto& [d, v] : e.statistic) CHECK(v >= 0.0);
  CHECK_THROWS_AS(estimate_general(c, EstimatorConfig::user_supplied(3, {{1, 1}, {2, 1}, {3, 1}}), Seed{}), InvalidArgument);
}

TEST_CASE("binary and restricted general estimates agree") {
  const auto cfg = segment_thresholds({20});
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto c = sample(s % 2 ? square() : segment2(), 20, derive(Seed{44}, s));
    CHECK(estimate_binary(c, 1, 2, cfg, Seed{s}).d_hat == estimate_general(c, cfg, Seed{s}).d_hat);
  }
}

TEST_CASE("estimates are deterministic") {
  const auto cfg = segment_thresholds({30});
  const auto c = sample(square(), 30, Seed{9});
  const auto a = estimate_general(c, cfg, Seed{4}), b = estimate_general(c, cfg, Seed{4});
  CHECK(a.d_hat == b.d_hat);
  CHECK(a.statistic == b.statistic);
}

TEST_CASE("calibration record and safety monotonicity") {
  const auto a = segment_thresholds({10, 30}, 1.0);
  const auto b = segment_thresholds({10, 30}, 1.5);
  const auto c = segment_thresholds({10, 30}, 3.0);
  CHECK(b.threshold(1) == Approx(1.5 * b.calibration.observed_max.at(1)).epsilon(1e-15));
  CHECK(a.threshold(1) <= b.threshold(1));
  CHECK(b.threshold(1) <= c.threshold(1));
  CHECK(b.calibration.kind == CalibrationRecord::Kind::calibrated);
  CHECK(b.calibration.trials == 100);
  CHECK(b.calibration.n_values == std::vector<std::size_t>{10, 30});
  CHECK(b.calibration.reference_samplers.at(1) == segment2().name());
  // Fresh segment statistics stay below the calibrated threshold.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto cloud = sample(segment2(), 30, derive(Seed{3}, s));
    CHECK(min_power_path(cloud, 1, Seed{s}).length <= b.threshold(1));
  }
}

TEST_CASE("calibrated segment threshold approaches safety times length") {
  const auto cfg = segment_thresholds({200});
  const double observed = cfg.calibration.observed_max.at(1);
  CHECK(observed <= 2.0 * (1.0 + 1e-9));
  CHECK(observed >= 1.95);
  CHECK(cfg.threshold(1) == Approx(1.5 * observed).epsilon(1e-15));
}

TEST_CASE("calibration errors") {
  CHECK_THROWS_AS(calibrate_thresholds(RegularityParams::defaults(3), {{1, uniform_cube_spec(1, RegularityParams::defaults(3))}},
                                       {10}, 5, 1.5, Seed{}),
                  CalibrationError);
  CHECK_THROWS_AS(calibrate_thresholds(params2(), {{1, square()}}, {10}, 5, 1.5, Seed{}), CalibrationError);
  CHECK_THROWS_AS(calibrate_thresholds(params2(), {{1, segment2()}}, {10}, 5, 0.9, Seed{}), InvalidArgument);
  CHECK_THROWS_AS(calibrate_thresholds(params2(), {{1, segment2()}}, {}, 5, 1.5, Seed{}), InvalidArgument);
  CHECK_THROWS_AS(calibrate_thresholds(params2(), {{1, segment2()}}, {10}, 0, 1.5, Seed{}), InvalidArgument);
}

TEST_CASE("never overestimate on calibration-range reference data") {
  const auto cfg = segment_thresholds({15, 40});
  for (std::size_t n : {15u, 40u})
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto c = sample(segment2(), n, derive(Seed{91}, n, s));
      CHECK(estimate_general(c, cfg, Seed{s}).d_hat <= 1);
    }
}
