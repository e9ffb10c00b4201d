#pragma once

// Independent reference computations used by the tests. None of these reuse
// the library's solvers; they only rely on the public data types.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tspdim/core_types.hpp"
#include "tspdim/geometry.hpp"

namespace oracle {

using tspdim::Point;
using tspdim::PointCloud;

inline double path_length(const PointCloud& c, const std::vector<std::size_t>& order, int d) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    double sq = 0.0;
    const auto a = c.point(order[i]), b = c.point(order[i + 1]);
    for (std::size_t j = 0; j < a.size(); ++j) sq += (a[j] - b[j]) * (a[j] - b[j]);
    total += std::pow(std::sqrt(sq), d);
  }
  return total;
}

struct BruteForce {
  double length = 0.0;
  std::vector<std::size_t> first_order;  // lexicographically first order within 1e-12 relative
};

// Full n! enumeration in lexicographic order.
inline BruteForce brute_force_min_path(const PointCloud& c, int d) {
  std::vector<std::size_t> p(c.size());
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<double> lengths;
  std::vector<std::vector<std::size_t>> orders;
  double best = std::numeric_limits<double>::infinity();
  do {
    const double len = path_length(c, p, d);
    best = std::min(best, len);
    lengths.push_back(len);
    orders.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  BruteForce out{best, {}};
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (lengths[i] <= best * (1.0 + 1e-12)) {
      out.first_order = orders[i];
      break;
    }
  return out;
}

inline double dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Distance from x to the curve: dense arclength scan, then golden-section
// refinement of |x - gamma(s)| around the best sample.
inline double distance_to_curve(const tspdim::PiecewiseCurve& curve, const Point& x, double step) {
  const double L = curve.length();
  const auto samples = static_cast<std::size_t>(std::ceil(L / step));
  double best = std::numeric_limits<double>::infinity(), best_s = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double s = L * static_cast<double>(i) / static_cast<double>(samples);
    const double dd = dist(curve.point_at(s), x);
    if (dd < best) {
      best = dd;
      best_s = s;
    }
  }
  const double h = L / static_cast<double>(samples);
  double lo = std::max(0.0, best_s - h), hi = std::min(L, best_s + h);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (dist(curve.point_at(m1), x) < dist(curve.point_at(m2), x)) hi = m2;
    else lo = m1;
  }
  return std::min(best, dist(curve.point_at(0.5 * (lo + hi)), x));
}

// Root of cos t (q - p + 2 tau (1 - cos t)) + sin t (b - 2 tau sin t) on
// (0, pi): first sign change on a fine scan, then bisection.
inline double bisect_t0(double p, double q, double b, double tau) {
  auto f = [&](double t) {
    return std::cos(t) * (q - p + 2.0 * tau * (1.0 - std::cos(t))) + std::sin(t) * (b - 2.0 * tau * std::sin(t));
  };
  const int steps = 100000;
  const double pi = 3.14159265358979323846;
  double lo = 1e-15, hi = lo;
  for (int i = 1; i <= steps; ++i) {
    const double t = pi * i / steps;
    if (f(t) >= 0.0) {
      hi = t;
      break;
    }
    lo = t;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KS {
  double D = 0.0;
  double p_value = 1.0;
};

inline KS ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * D;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return {D, std::clamp(p, 0.0, 1.0)};
}

inline double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace oracle
