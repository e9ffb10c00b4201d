#pragma once

// Minimal d-power length over open Hamiltonian paths through a point cloud:
//   min over orders sigma of  sum_{i<n} ||X_sigma(i+1) - X_sigma(i)||^d
// Exact subset dynamic programming up to a cutoff, nearest-neighbour + 2-opt
// above it. The heuristic never reports less than the true minimum.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "tspdim/core_types.hpp"

namespace tspdim {

inline constexpr std::size_t kExactCutoff = 13;

struct PowerPath {
  std::vector<std::size_t> order;  // 0-based visiting order
  int power = 1;
  double length = 0.0;
  bool exact = false;
};

inline void check_power(int d) {
  if (d < 1) throw InvalidArgument("path power must be >= 1");
}

inline double path_power_length(const PointCloud& cloud, std::span<const std::size_t> order, int d) {
  check_power(d);
  const std::size_t n = cloud.size();
  if (order.size() != n) throw InvalidArgument("path order length does not match cloud size");
  std::vector<char> seen(n, 0);
  for (std::size_t v : order) {
    if (v >= n || seen[v]) throw InvalidArgument("path order is not a permutation");
    seen[v] = 1;
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) total += power_distance(cloud.point(order[i]), cloud.point(order[i + 1]), d);
  return total;
}

namespace detail {

// Edge weights ||xi - xj||^d, cached as a dense matrix for moderate n.
class PowerWeights {
 public:
  static constexpr std::size_t kDenseLimit = 3000;

  PowerWeights(const PointCloud& cloud, int d) : cloud_(&cloud), d_(d), n_(cloud.size()) {
    if (n_ <= kDenseLimit) {
      dense_.assign(n_ * n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j)
          dense_[i * n_ + j] = dense_[j * n_ + i] = power_distance(cloud.point(i), cloud.point(j), d);
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (!dense_.empty()) return dense_[i * n_ + j];
    return power_distance(cloud_->point(i), cloud_->point(j), d_);
  }

  std::size_t size() const { return n_; }

 private:
  const PointCloud* cloud_;
  int d_;
  std::size_t n_;
  std::vector<double> dense_;
};

inline bool within_tie(double candidate, double target) {
  return candidate <= target + 1e-12 * std::max(std::abs(target), 1e-300);
}

inline std::vector<std::size_t> nearest_neighbour_path(const PowerWeights& w, std::size_t start) {
  const std::size_t n = w.size();
  std::vector<std::size_t> order{start};
  std::vector<char> used(n, 0);
  used[start] = 1;
  std::size_t cur = start;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_w = kInf;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      const double c = w(cur, v);
      if (c < best_w) {
        best_w = c;
        best = v;
      }
    }
    used[best] = 1;
    order.push_back(best);
    cur = best;
  }
  return order;
}

// First-improvement 2-opt on an open path. Reversing positions [i+1, j]
// replaces edges (i, i+1) and (j, j+1); a missing edge at either end of the
// path contributes nothing, which also allows prefix and suffix reversals.
inline void two_opt(const PowerWeights& w, std::vector<std::size_t>& p) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(p.size());
  if (n < 3) return;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::ptrdiff_t i = -1; i < n - 2; ++i) {
      for (std::ptrdiff_t j = i + 2; j < n; ++j) {
        if (i < 0 && j == n - 1) continue;
        double before = 0.0, after = 0.0;
        if (i >= 0) {
          before += w(p[i], p[i + 1]);
          after += w(p[i], p[j]);
        }
        if (j < n - 1) {
          before += w(p[j], p[j + 1]);
          after += w(p[i + 1], p[j + 1]);
        }
        if (after < before - 1e-12 * before) {
          std::reverse(p.begin() + (i + 1), p.begin() + (j + 1));
          improved = true;
        }
      }
    }
  }
}

inline double path_length(const PowerWeights& w, const std::vector<std::size_t>& p) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) total += w(p[i], p[i + 1]);
  return total;
}

}  // namespace detail

// Held-Karp style DP. best[S][v] is the cheapest path that starts at v and
// visits exactly the vertex set S. Among optimal orders the lexicographically
// smallest one is returned.
inline PowerPath min_power_path_exact(const PointCloud& cloud, int d, std::size_t cutoff = kExactCutoff) {
  check_power(d);
  const std::size_t n = cloud.size();
  if (n > cutoff || n > 20)
    throw InvalidArgument("exact solver refuses n=" + std::to_string(n) + " above cutoff; use the heuristic");
  PowerPath out;
  out.power = d;
  out.exact = true;
  if (n == 1) {
    out.order = {0};
    return out;
  }
  const detail::PowerWeights w(cloud, d);
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> best((full + 1) * n, kInf);
  auto at = [&](std::size_t set, std::size_t v) -> double& { return best[set * n + v]; };
  for (std::size_t v = 0; v < n; ++v) at(std::size_t{1} << v, v) = 0.0;
  for (std::size_t set = 1; set <= full; ++set) {
    if ((set & (set - 1)) == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (!(set >> v & 1)) continue;
      const std::size_t rest = set & ~(std::size_t{1} << v);
      double m = kInf;
      for (std::size_t u = 0; u < n; ++u) {
        if (!(rest >> u & 1)) continue;
        m = std::min(m, w(v, u) + at(rest, u));
      }
      at(set, v) = m;
    }
  }
  double opt = kInf;
  for (std::size_t v = 0; v < n; ++v) opt = std::min(opt, at(full, v));

  std::size_t set = full;
  std::size_t cur = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (detail::within_tie(at(full, v), opt)) {
      cur = v;
      break;
    }
  }
  out.order.push_back(cur);
  while (set != (std::size_t{1} << cur)) {
    const std::size_t rest = set & ~(std::size_t{1} << cur);
    const double target = at(set, cur);
    std::size_t next = n;
    for (std::size_t u = 0; u < n; ++u) {
      if ((rest >> u & 1) && detail::within_tie(w(cur, u) + at(rest, u), target)) {
        next = u;
        break;
      }
    }
    out.order.push_back(next);
    set = rest;
    cur = next;
  }
  out.length = path_power_length(cloud, out.order, d);
  return out;
}

inline std::size_t default_restarts(std::size_t n) { return std::max<std::size_t>(8, n / 10); }

// Best of R nearest-neighbour starts, each polished by 2-opt on the d-power
// weights. restarts == 0 selects max(8, n/10).
inline PowerPath min_power_path_heuristic(const PointCloud& cloud, int d, Seed seed, std::size_t restarts = 0) {
  check_power(d);
  const std::size_t n = cloud.size();
  PowerPath out;
  out.power = d;
  out.exact = false;
  if (n <= 2) {
    out.order.resize(n);
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    out.length = path_power_length(cloud, out.order, d);
    return out;
  }
  if (restarts == 0) restarts = default_restarts(n);
  std::vector<std::size_t> starts(n);
  std::iota(starts.begin(), starts.end(), std::size_t{0});
  if (restarts < n) {
    Rng rng = make_rng(seed);
    std::shuffle(starts.begin(), starts.end(), rng);
    starts.resize(restarts);
  }
  const detail::PowerWeights w(cloud, d);
  double best = kInf;
  for (std::size_t s : starts) {
    auto p = detail::nearest_neighbour_path(w, s);
    detail::two_opt(w, p);
    const double len = detail::path_length(w, p);
    if (len < best) {
      best = len;
      out.order = std::move(p);
    }
  }
  out.length = path_power_length(cloud, out.order, d);
  return out;
}

inline PowerPath min_power_path(const PointCloud& cloud, int d, Seed seed, std::size_t cutoff = kExactCutoff) {
  if (cloud.size() <= cutoff) return min_power_path_exact(cloud, d, cutoff);
  return min_power_path_heuristic(cloud, d, seed);
}

}  // namespace tspdim
