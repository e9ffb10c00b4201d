#include <catch_amalgamated.hpp>

#include <cmath>

#include "tspdim/lecam.hpp"

using namespace tspdim;
using Catch::Approx;

namespace {

LeCamInstance instance(std::size_t n, std::size_t draws = 128) {
  LeCamInstance inst;
  inst.params = ZigzagParams::make(1, 2, n, 1.0, 0.25);
  inst.n = n;
  inst.mixture_draws = draws;
  return inst;
}

}  // namespace

TEST_CASE("density ratio floor examples") {
  const auto half = ZigzagParams::make(1, 2, 1, 1.0, 0.5);
  CHECK(density_ratio_floor(half, 1) == Approx(0.25).epsilon(1e-15));
  const auto quarter = ZigzagParams::make(1, 2, 2, 1.0, 0.25);
  CHECK(density_ratio_floor(quarter, 2) == Approx(1.0 / 64.0).epsilon(1e-15));
}

TEST_CASE("region volume at n = 1") {
  const auto p = ZigzagParams::make(1, 2, 1, 1.0, 0.25);
  CHECK(p.a == Approx(0.5).epsilon(1e-15));
  CHECK(p.w == Approx(0.125).epsilon(1e-15));
  // omega_1 = 2: T_1 is a 0.5 x 0.25 rectangle in a cube of area 4.
  CHECK(region_T_volume(p, 1) == Approx(0.5 * 0.25 / 4.0).epsilon(1e-15));
  const auto p3 = ZigzagParams::make(1, 3, 1, 1.0, 0.25);
  CHECK(region_T_volume(p3, 1) == Approx(M_PI * p3.w * p3.w * p3.a / 8.0).epsilon(1e-14));
}

TEST_CASE("region volume matches Monte-Carlo membership at n = 2") {
  const auto p = ZigzagParams::make(1, 2, 2, 1.0, 0.25);
  const auto M = ZigzagManifold::build(p);
  Rng rng = make_rng(Seed{12});
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t trials = 2'000'000;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Point x1{u(rng), u(rng)}, x2{u(rng), u(rng)};
    hits += (M.in_t_block(0, x1) && M.in_t_block(1, x2)) || (M.in_t_block(1, x1) && M.in_t_block(0, x2));
  }
  const double est = double(hits) / trials;
  const double se = std::sqrt(est * (1.0 - est) / trials);
  CHECK(std::abs(est - region_T_volume(p, 2)) <= 3.0 * se);
}

TEST_CASE("region volume shrinks as tau decreases") {
  for (std::size_t n : {1u, 2u}) {
    double prev = 0.0;
    for (double tau = 0.01; tau <= 0.1; tau += 0.01) {
      const double v = region_T_volume(ZigzagParams::make(1, 2, n, 1.0, tau), n);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("affinity of identical uniform distributions is 1") {
  auto inst = instance(1);
  inst.model = LeCamInstance::Q1Model::uniform_cube;
  const auto r = affinity_bruteforce(inst, Seed{1});
  CHECK(std::abs(r.affinity - 1.0) <= 2.0 * r.std_error);
}

TEST_CASE("affinity of disjoint supports is 0") {
  auto inst = instance(1, 32);
  inst.curve_shift = {3.0, 0.0};
  const auto r = affinity_bruteforce(inst, Seed{1});
  CHECK(r.affinity == 0.0);
  CHECK(r.outside_mass == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("affinity exceeds the density ratio floor times the region volume") {
  for (std::size_t n : {1u, 2u}) {
    const auto r = affinity_bruteforce(instance(n), Seed{7});
    INFO("n=" << n << " affinity=" << r.affinity << " se=" << r.std_error << " bound=" << r.bound);
    CHECK(r.affinity >= 0.0);
    CHECK(r.affinity <= 1.0);
    CHECK(r.std_error >= 0.0);
    CHECK(r.affinity >= r.bound - 3.0 * r.std_error);
    // Testing-risk chain: affinity / 4 against the same quantity / 4.
    CHECK(r.affinity / 4.0 >= r.ratio_floor * r.region_volume / 4.0);
    CHECK(r.passes);
    CHECK(r.epsilon == Approx(0.125 / 50.0).epsilon(1e-15));
  }
}

TEST_CASE("affinity is reproducible per seed") {
  const auto a = affinity_bruteforce(instance(1, 32), Seed{3});
  const auto b = affinity_bruteforce(instance(1, 32), Seed{3});
  CHECK(a.affinity == b.affinity);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("local density ratio exceeds the density ratio floor inside T") {
  const auto inst = instance(1);
  const auto ratios = local_density_ratios(inst, Seed{5});
  REQUIRE(ratios.size() > 20);
  const double bound = density_ratio_floor(inst.params, 1);
  std::size_t above = 0;
  for (double r : ratios) above += r > bound;
  CHECK(double(above) >= 0.99 * double(ratios.size()));
}

TEST_CASE("lecam instance checks") {
  auto inst = instance(1);
  inst.n = 3;
  CHECK_THROWS_AS(affinity_bruteforce(inst, Seed{}), InvalidArgument);
  LeCamInstance three;
  three.params = ZigzagParams::make(1, 3, 2, 1.0, 0.25);
  three.n = 2;
  CHECK_THROWS_AS(affinity_bruteforce(three, Seed{}), InvalidArgument);
  auto few = instance(1, 8);
  CHECK_THROWS_AS(affinity_bruteforce(few, Seed{}), InvalidArgument);
  CHECK_THROWS_AS(local_density_ratios(instance(2), Seed{}), InvalidArgument);
}
