#include <catch_amalgamated.hpp>

#include <cmath>

#include "tspdim/core_types.hpp"

using namespace tspdim;
using Catch::Approx;

TEST_CASE("unit ball volume small cases") {
  CHECK(unit_ball_volume(0) == 1.0);
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == Approx(3.14159265358979).epsilon(1e-14));
  CHECK_THROWS_AS(unit_ball_volume(-1), InvalidArgument);
}

TEST_CASE("unit ball volume matches the gamma-function formula") {
  for (int d = 0; d <= 20; ++d) {
    const double ref = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    CHECK(unit_ball_volume(d) == Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("validate_params ranges") {
  RegularityParams p{0.1, 0.2, 1.0, 0.25, 4.0, 2};
  CHECK(validate_params(p).empty());

  auto swapped = p;
  swapped.tau_g = 0.3;
  const auto v1 = validate_params(swapped);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == "tau_g <= tau_l");

  auto big_kv = p;
  big_kv.K_v = 1.0;
  const auto v2 = validate_params(big_kv);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0] == "K_v in (0, 2^-m]");

  auto small_kp = p;
  small_kp.K_p = 3.9;
  CHECK(validate_params(small_kp).size() == 1);

  auto small_ki = p;
  small_ki.K_I = 0.5;
  CHECK_FALSE(validate_params(small_ki).empty());

  CHECK(validate_params(RegularityParams::defaults(3)).empty());
  CHECK(validate_params(RegularityParams::defaults(2, 1.0, kInf, kInf)).empty());
}

TEST_CASE("validate_params is pure") {
  RegularityParams p{0.3, 0.2, 0.5, 1.0, 0.0, 2};
  CHECK(validate_params(p) == validate_params(p));
  CHECK(validate_params(p).size() == 4);
}

TEST_CASE("point cloud invariants") {
  CHECK_THROWS_AS(PointCloud(2, {}), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(2, {0.1, 0.2, 0.3}), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(2, {0.1, 1.5}), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(1, {std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(PointCloud::from_points({{0.0, 0.0}, {0.0}}), InvalidArgument);
  CHECK_NOTHROW(PointCloud(2, {0.1, 1.5}, CloudMeta{"x", {}, {}, 2.0}));

  const auto c = PointCloud::from_points({{0.0, 1.0}, {-1.0, 0.5}, {0.25, -0.25}});
  CHECK(c.size() == 3);
  CHECK(c.dim() == 2);
  CHECK(c.point(1)[0] == -1.0);
  const auto s = c.scaled(2.0);
  CHECK(s.point(0)[1] == 2.0);
  CHECK(s.meta().K_I == 2.0);
}

TEST_CASE("seeds reproduce streams and derived streams differ") {
  Rng a = make_rng(Seed{42}), b = make_rng(Seed{42});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(derive(Seed{1}, 0).value != derive(Seed{1}, 1).value);
  CHECK(derive(Seed{1}, 0).value != derive(Seed{2}, 0).value);
  CHECK(derive(Seed{7}, 3, 4) == derive(derive(Seed{7}, 3), 4));
  CHECK(make_rng(derive(Seed{9}, 1))() != make_rng(derive(Seed{9}, 2))());
}

TEST_CASE("estimator config thresholds") {
  CHECK_NOTHROW(EstimatorConfig::user_supplied(2, {{1, 3.0}, {2, kInf}}));
  CHECK_THROWS_AS(EstimatorConfig::user_supplied(2, {{1, 3.0}}), InvalidArgument);
  CHECK_THROWS_AS(EstimatorConfig::user_supplied(2, {{1, 0.0}, {2, 1.0}}), InvalidArgument);
  const auto c = EstimatorConfig::user_supplied(1, {{1, 2.0}});
  CHECK(c.threshold(1) == 2.0);
  CHECK_THROWS_AS(c.threshold(2), InvalidArgument);
}

TEST_CASE("power distance") {
  const std::vector<double> a{0.0, 0.0}, b{3.0, 4.0};
  CHECK(power_distance(a, b, 1) == 5.0);
  CHECK(power_distance(a, b, 2) == 25.0);
  CHECK(power_distance(a, b, 3) == Approx(125.0).epsilon(1e-15));
}
