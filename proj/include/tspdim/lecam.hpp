#pragma once

// Two-point testing affinity between
//   Q1 = mixture over offsets Y ~ U(B(0, w))^n of (uniform on the zigzag curve)^n
//   Q2 = (uniform on [-K_I, K_I]^{d2})^n
// evaluated on a cell grid for n <= 2. Q1 is singular, so each curve is
// thickened to a tube of radius eps = w / 50 before binning; the tube
// Jacobian (1 - kappa * offset) is ignored, a relative bias of at most eps / tau_l.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tspdim/core_types.hpp"
#include "tspdim/manifolds.hpp"

namespace tspdim {

struct LeCamInstance {
  enum class Q1Model { zigzag_tube, uniform_cube };

  ZigzagParams params;            // d1 = 1
  std::size_t n = 1;              // sample points, 1 or 2
  std::size_t mixture_draws = 512;
  double eps_fraction = 1.0 / 50.0;  // eps = eps_fraction * w
  int cells_per_a = 10;           // cell side along the row axis <= a / cells_per_a
  int cells_per_w = 10;           // cell side across rows <= w / cells_per_w
  Q1Model model = Q1Model::zigzag_tube;
  Point curve_shift;              // optional translation of every curve (empty = none)
  std::size_t jackknife_groups = 16;

  double epsilon() const { return eps_fraction * params.w; }

  void validate() const {
    if (params.d1 != 1) throw InvalidArgument("lecam: native zigzag needs d1 = 1");
    if (n < 1 || n > 2) throw InvalidArgument("lecam: brute force supports n in {1, 2}");
    if (n * static_cast<std::size_t>(params.d2) > 4) throw InvalidArgument("lecam: n * d2 must be <= 4");
    if (mixture_draws < jackknife_groups || jackknife_groups < 2) throw InvalidArgument("lecam: need draws >= groups >= 2");
    if (!(eps_fraction > 0.0 && eps_fraction < 1.0)) throw InvalidArgument("lecam: eps_fraction must be in (0, 1)");
    if (cells_per_a < 1 || cells_per_w < 1) throw InvalidArgument("lecam: grid divisions must be >= 1");
    if (!curve_shift.empty() && curve_shift.size() != static_cast<std::size_t>(params.d2))
      throw InvalidArgument("lecam: curve_shift must have length d2");
  }
};

// Axis-aligned grid tiling [-K, K]^D exactly: axis 0 with cells of side
// <= a / cells_per_a, the others <= w / cells_per_w.
struct CellGrid {
  double K = 1.0;
  std::vector<std::size_t> counts;
  std::vector<double> side;

  static CellGrid make(const LeCamInstance& inst) {
    const auto& p = inst.params;
    CellGrid g;
    g.K = p.K_I;
    for (int j = 0; j < p.d2; ++j) {
      const double target = j == 0 ? p.a / inst.cells_per_a : p.w / inst.cells_per_w;
      const auto c = static_cast<std::size_t>(std::ceil(2.0 * p.K_I / target - 1e-9));
      g.counts.push_back(std::max<std::size_t>(c, 1));
      g.side.push_back(2.0 * p.K_I / static_cast<double>(g.counts.back()));
    }
    if (g.total() > 50'000'000) throw InvalidArgument("lecam: grid too large");
    return g;
  }

  std::size_t total() const {
    std::size_t t = 1;
    for (auto c : counts) t *= c;
    return t;
  }

  // Cell id of x, or -1 outside the closed cube.
  std::int64_t cell_of(std::span<const double> x) const {
    std::int64_t id = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (!(std::abs(x[j]) <= K)) return -1;
      auto c = static_cast<std::int64_t>(std::floor((x[j] + K) / side[j]));
      c = std::clamp<std::int64_t>(c, 0, static_cast<std::int64_t>(counts[j]) - 1);
      id = id * static_cast<std::int64_t>(counts[j]) + c;
    }
    return id;
  }

  std::vector<std::pair<double, double>> bounds_of(std::size_t id) const {
    std::vector<std::pair<double, double>> b(counts.size());
    for (std::size_t j = counts.size(); j-- > 0;) {
      const std::size_t c = id % counts[j];
      id /= counts[j];
      b[j] = {-K + side[j] * static_cast<double>(c), -K + side[j] * static_cast<double>(c + 1)};
    }
    return b;
  }
};

struct AffinityResult {
  double affinity = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
  std::size_t cells = 0;         // grid cells per copy of the cube
  std::size_t support = 0;       // cells hit by some draw
  double outside_mass = 0.0;     // Q1 mass outside the cube^n
  double epsilon = 0.0;
  double ratio_floor = 0.0;
  double region_volume = 0.0;
  double bound = 0.0;            // ratio_floor * region_volume
  bool passes = false;           // affinity >= bound - 3 std_error
};

// n! (omega_k a w^k (2K)^{d1-1} / (2K)^{d2})^n, k = d2 - d1: normalized
// volume of the symmetrized product of the T_i.
inline double region_T_volume(const ZigzagParams& p, std::size_t n) {
  const int k = p.d2 - p.d1;
  const double two_k = 2.0 * p.K_I;
  const double one = unit_ball_volume(k) * p.a * std::pow(p.w, k) * std::pow(two_k, p.d1 - 1) / std::pow(two_k, p.d2);
  double fact = 1.0;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  return fact * std::pow(one, static_cast<double>(n));
}

// tau_l^{kn} / (2^n K_I^{kn})
inline double density_ratio_floor(const ZigzagParams& p, std::size_t n) {
  const double kn = static_cast<double>(p.d2 - p.d1) * static_cast<double>(n);
  return std::pow(p.tau_l / p.K_I, kn) / std::pow(2.0, static_cast<double>(n));
}

namespace detail {

// Sparse cell distribution of one mixture draw.
struct DrawMass {
  std::vector<std::int64_t> cells;  // sorted
  std::vector<double> mass;
  double outside = 0.0;
};

// Stratified points of the k-ball of radius eps (cell centres of a j^k grid
// that fall inside the ball).
inline std::vector<Point> ball_stencil(int k, double eps, int j = 4) {
  std::vector<Point> pts;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Point p(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = eps * (2.0 * idx[static_cast<std::size_t>(i)] + 1.0 - j) / j;
    if (vec::norm(p) <= eps) pts.push_back(p);
    int i = 0;
    while (i < k && ++idx[static_cast<std::size_t>(i)] == j) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == k) break;
  }
  return pts;
}

// Cell masses of the eps-tube around the curve by midpoint quadrature in
// arclength and the ball stencil across it.
inline DrawMass tube_mass(const PiecewiseCurve& curve, const CellGrid& grid, double eps) {
  const int k = static_cast<int>(curve.dim()) - 1;
  const auto stencil = ball_stencil(k, eps);
  const double h = *std::min_element(grid.side.begin(), grid.side.end()) / 4.0;
  const auto strata = static_cast<std::size_t>(std::ceil(curve.length() / h));
  const double ds = curve.length() / static_cast<double>(strata);
  std::vector<std::int64_t> hits;
  hits.reserve(strata * stencil.size());
  std::size_t outside = 0;
  for (std::size_t j = 0; j < strata; ++j) {
    const double s = (static_cast<double>(j) + 0.5) * ds;
    const Point c = curve.point_at(s);
    const auto normals = vec::normal_basis(curve.tangent_at(s));
    for (const auto& off : stencil) {
      Point x = c;
      for (std::size_t i = 0; i < normals.size(); ++i) x = vec::axpy(x, off[i], normals[i]);
      const auto id = grid.cell_of(x);
      if (id < 0) ++outside;
      else hits.push_back(id);
    }
  }
  const double total = static_cast<double>(strata * stencil.size());
  std::sort(hits.begin(), hits.end());
  DrawMass out;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t e = i;
    while (e < hits.size() && hits[e] == hits[i]) ++e;
    out.cells.push_back(hits[i]);
    out.mass.push_back(static_cast<double>(e - i) / total);
    i = e;
  }
  out.outside = static_cast<double>(outside) / total;
  return out;
}

inline std::vector<DrawMass> mixture_masses(const LeCamInstance& inst, const CellGrid& grid, Seed seed) {
  std::vector<DrawMass> draws;
  draws.reserve(inst.mixture_draws);
  for (std::size_t t = 0; t < inst.mixture_draws; ++t) {
    Rng rng = make_rng(derive(seed, t));
    const auto M = ZigzagManifold::build(inst.params, random_offsets(inst.params, rng));
    const PiecewiseCurve curve = inst.curve_shift.empty() ? M.curve() : M.curve().translated(inst.curve_shift);
    draws.push_back(tube_mass(curve, grid, inst.epsilon()));
  }
  return draws;
}

// 1 - (outside + sum_cells |q1 - q2|) / 2 equals sum_cells min(q1, q2) when
// both have unit total mass, and is exactly 1 when q1 == q2 bitwise.
struct AffinityAccumulator {
  std::vector<std::int64_t> support;
  std::size_t cells = 0;
  std::size_t n = 1;

  // q1 over support (n = 1) or support x support (n = 2).
  double affinity(const std::vector<double>& q1, double outside) const {
    const double cells_n = std::pow(static_cast<double>(cells), static_cast<double>(n));
    const double q2 = 1.0 / cells_n;
    double l1 = 0.0;
    for (double v : q1) l1 += std::abs(v - q2);
    l1 += (cells_n - static_cast<double>(q1.size())) * q2;
    return std::clamp(1.0 - 0.5 * (outside + l1), 0.0, 1.0);
  }
};

}  // namespace detail

inline AffinityResult affinity_bruteforce(const LeCamInstance& inst, Seed seed) {
  inst.validate();
  const auto grid = CellGrid::make(inst);
  AffinityResult out;
  out.cells = grid.total();
  out.draws = inst.mixture_draws;
  out.epsilon = inst.epsilon();
  out.ratio_floor = density_ratio_floor(inst.params, inst.n);
  out.region_volume = region_T_volume(inst.params, inst.n);
  out.bound = out.ratio_floor * out.region_volume;

  if (inst.model == LeCamInstance::Q1Model::uniform_cube) {
    out.support = out.cells;
    out.affinity = 1.0;
    out.std_error = 0.0;
    out.passes = true;
    return out;
  }

  const auto draws = detail::mixture_masses(inst, grid, seed);
  detail::AffinityAccumulator acc;
  acc.cells = grid.total();
  acc.n = inst.n;
  for (const auto& d : draws) acc.support.insert(acc.support.end(), d.cells.begin(), d.cells.end());
  std::sort(acc.support.begin(), acc.support.end());
  acc.support.erase(std::unique(acc.support.begin(), acc.support.end()), acc.support.end());
  out.support = acc.support.size();
  const std::size_t S = acc.support.size();

  // Draw masses re-indexed into the support.
  std::vector<std::vector<std::pair<std::size_t, double>>> local(draws.size());
  for (std::size_t t = 0; t < draws.size(); ++t)
    for (std::size_t i = 0; i < draws[t].cells.size(); ++i) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(acc.support.begin(), acc.support.end(), draws[t].cells[i]) - acc.support.begin());
      local[t].push_back({pos, draws[t].mass[i]});
    }

  const std::size_t G = inst.jackknife_groups;
  const std::size_t dim = inst.n == 1 ? S : S * S;
  auto accumulate = [&](std::vector<double>& q, double& outside, std::size_t t) {
    const double o = draws[t].outside;
    if (inst.n == 1) {
      for (const auto& [i, v] : local[t]) q[i] += v;
      outside += o;
    } else {
      for (const auto& [i, vi] : local[t])
        for (const auto& [j, vj] : local[t]) q[i * S + j] += vi * vj;
      outside += 1.0 - (1.0 - o) * (1.0 - o);
    }
  };

  std::vector<double> total(dim, 0.0);
  double total_out = 0.0;
  for (std::size_t t = 0; t < draws.size(); ++t) accumulate(total, total_out, t);
  const double D = static_cast<double>(draws.size());
  {
    std::vector<double> q(total);
    for (double& v : q) v /= D;
    out.outside_mass = total_out / D;
    out.affinity = acc.affinity(q, out.outside_mass);
  }

  // Grouped jackknife over draw groups t % G.
  std::vector<double> loo(G);
  std::vector<double> group(dim), q(dim);
  for (std::size_t g = 0; g < G; ++g) {
    std::fill(group.begin(), group.end(), 0.0);
    double group_out = 0.0;
    std::size_t members = 0;
    for (std::size_t t = g; t < draws.size(); t += G, ++members) accumulate(group, group_out, t);
    const double rest = D - static_cast<double>(members);
    for (std::size_t i = 0; i < dim; ++i) q[i] = (total[i] - group[i]) / rest;
    loo[g] = acc.affinity(q, (total_out - group_out) / rest);
  }
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / static_cast<double>(G);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.std_error = std::sqrt(static_cast<double>(G - 1) / static_cast<double>(G) * ss);
  out.passes = out.affinity >= out.bound - 3.0 * out.std_error;
  return out;
}

// q1 / q2 cell-mass ratios for n = 1 over grid cells lying entirely inside
// some T_i.
inline std::vector<double> local_density_ratios(const LeCamInstance& inst, Seed seed) {
  inst.validate();
  if (inst.n != 1) throw InvalidArgument("local_density_ratios: only n = 1");
  const auto grid = CellGrid::make(inst);
  const auto draws = detail::mixture_masses(inst, grid, seed);
  const auto M = ZigzagManifold::build(inst.params);
  const std::size_t D = static_cast<std::size_t>(inst.params.d2);
  const double q2 = 1.0 / static_cast<double>(grid.total());
  std::vector<double> ratios;
  auto inside_some_T = [&](std::size_t id) {
    const auto b = grid.bounds_of(id);
    for (std::size_t i = 0; i < inst.params.n_blocks; ++i) {
      bool all = true;
      for (std::size_t corner = 0; corner < (std::size_t{1} << D) && all; ++corner) {
        Point x(D);
        for (std::size_t j = 0; j < D; ++j) x[j] = (corner >> j & 1) ? b[j].second : b[j].first;
        all = M.in_t_block(i, x);
      }
      if (all) return true;
    }
    return false;
  };
  // Cells never hit by any draw have q1 = 0; include them too.
  std::vector<double> q1(grid.total(), 0.0);
  for (const auto& d : draws)
    for (std::size_t i = 0; i < d.cells.size(); ++i)
      q1[static_cast<std::size_t>(d.cells[i])] += d.mass[i] / static_cast<double>(draws.size());
  for (std::size_t id = 0; id < grid.total(); ++id)
    if (inside_some_T(id)) ratios.push_back(q1[id] / q2);
  return ratios;
}

}  // namespace tspdim
