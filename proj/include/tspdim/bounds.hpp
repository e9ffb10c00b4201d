#pragma once

// Minimax-risk bound shapes and the standalone geometric inequalities they
// rest on. Rate expressions are evaluated in log space: n^{-n} underflows
// doubles well before n = 200. tau = +inf is honoured through IEEE
// arithmetic, so every negative power of an infinite tau is 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "tspdim/core_types.hpp"

namespace tspdim {

// Rate constants; all default to 1 so bound curves read as shapes.
struct BoundConstants {
  double C_lower = 1.0;
  double C_upper = 1.0;
  double C_binary_upper = 1.0;
  double C_binary_lower = 1.0;

  void validate() const {
    for (double c : {C_lower, C_upper, C_binary_upper, C_binary_lower})
      if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("bound constants must be positive and finite");
  }
};

namespace detail {

// log(1 + e^x)
inline double softplus(double x) {
  if (x == -kInf) return 0.0;
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline void check_n(double n) {
  if (!(n >= 1.0)) throw InvalidArgument("bound: n must be >= 1");
}

}  // namespace detail

// log[ C^n tau_l^n min{tau_l^-3 n^-2, 1}^n ] = n (log C + min{-2 log tau - 2 log n, log tau})
inline double log_bound_lower_general(double n, const RegularityParams& p, const BoundConstants& c = {}) {
  detail::check_n(n);
  c.validate();
  const double lt = std::log(p.tau_l);
  return n * (std::log(c.C_lower) + std::min(-2.0 * lt - 2.0 * std::log(n), lt));
}

// log[ C^n (1 + tau_g^{-(m^2 - m) n}) n^{-n/(m-1)} ]
inline double log_bound_upper_general(double n, const RegularityParams& p, const BoundConstants& c = {}) {
  detail::check_n(n);
  c.validate();
  if (p.m < 2) throw InvalidArgument("bound_upper_general: not applicable for m = 1");
  const double m = p.m;
  const double x = -(m * m - m) * n * std::log(p.tau_g);
  return n * std::log(c.C_upper) + detail::softplus(x) - n / (m - 1.0) * std::log(n);
}

// log[ C^n (1 + tau_g^{-(d2 m / d1 + m - 2 d2) n}) n^{-(d2/d1 - 1) n} ]
inline double log_bound_binary_upper(double n, int d1, int d2, const RegularityParams& p, const BoundConstants& c = {}) {
  detail::check_n(n);
  c.validate();
  if (d1 < 1 || d2 <= d1) throw InvalidArgument("bound_binary_upper: need 1 <= d1 < d2");
  const double m = p.m, r = static_cast<double>(d2) / d1;
  const double x = -(d2 * m / d1 + m - 2.0 * d2) * n * std::log(p.tau_g);
  return n * std::log(c.C_binary_upper) + detail::softplus(x) - (r - 1.0) * n * std::log(n);
}

// log[ C^n tau_l^{k n} min{tau_l^{-2k-1} n^-2, 1}^{k n} ], k = d2 - d1
//   = n log C + k n min{-2k log tau - 2 log n, log tau}
inline double log_bound_binary_lower(double n, int d1, int d2, const RegularityParams& p, const BoundConstants& c = {}) {
  detail::check_n(n);
  c.validate();
  if (d1 < 1 || d2 <= d1) throw InvalidArgument("bound_binary_lower: need 1 <= d1 < d2");
  const double k = d2 - d1;
  const double lt = std::log(p.tau_l);
  return n * std::log(c.C_binary_lower) + k * n * std::min(-2.0 * k * lt - 2.0 * std::log(n), lt);
}

inline double bound_lower_general(double n, const RegularityParams& p, const BoundConstants& c = {}) {
  return std::exp(log_bound_lower_general(n, p, c));
}
inline double bound_upper_general(double n, const RegularityParams& p, const BoundConstants& c = {}) {
  return std::exp(log_bound_upper_general(n, p, c));
}
inline double bound_binary_upper(double n, int d1, int d2, const RegularityParams& p, const BoundConstants& c = {}) {
  return std::exp(log_bound_binary_upper(n, d1, d2, p, c));
}
inline double bound_binary_lower(double n, int d1, int d2, const RegularityParams& p, const BoundConstants& c = {}) {
  return std::exp(log_bound_binary_lower(n, d1, d2, p, c));
}

// Volume bound for a d-manifold in [-K_I, K_I]^m with global reach tau_g.
// With C given: C (1 + tau_g^{d-m}). Otherwise the explicit chain
//   vol(M) <= vol(M_r) / (omega_{m-d} r^{m-d}) <= 2^m (K_I + r)^m / (omega_{m-d} r^{m-d})
// at r = min(tau_g, (m - d) K_I / d), the minimizer of the right side.
inline double volume_upper_bound(const RegularityParams& p, int d, std::optional<double> C = std::nullopt) {
  if (d < 1 || d > p.m) throw InvalidArgument("volume_upper_bound: need 1 <= d <= m");
  if (C) {
    if (!(*C > 0.0)) throw InvalidArgument("volume_upper_bound: constant must be positive");
    return *C * (1.0 + std::pow(p.tau_g, d - p.m));
  }
  const int k = p.m - d;
  const double r = std::min(p.tau_g, static_cast<double>(k) * p.K_I / d);
  const double log_v = p.m * std::log(2.0 * (p.K_I + r)) - std::log(unit_ball_volume(k)) - (k == 0 ? 0.0 : k * std::log(r));
  return std::exp(log_v);
}

// N = floor(2^d vol / (K_v r^d omega_d)) balls of radius r cover the manifold.
// A relative slack of 1e-12 keeps exact multiples from flooring down.
inline std::uint64_t covering_number_bound(double vol, int d, double K_v, double r,
                                           std::optional<double> tau_g = std::nullopt) {
  if (!(vol > 0.0) || d < 1 || !(K_v > 0.0) || !(r > 0.0)) throw InvalidArgument("covering_number_bound: invalid arguments");
  if (tau_g && !(r <= 4.0 * *tau_g)) throw InvalidArgument("covering_number_bound: need r <= 4 tau_g");
  const double x = std::ldexp(vol, d) / (K_v * std::pow(r, d) * unit_ball_volume(d));
  const double f = std::floor(x * (1.0 + 1e-12));
  if (!(f < 1.8e19)) throw InvalidArgument("covering_number_bound: value overflows");
  return static_cast<std::uint64_t>(f);
}

// sinh(kappa R) / (kappa R), with limit 1 at kappa R = 0.
inline double expmap_lipschitz_factor(double kappa, double R) {
  if (!(kappa >= 0.0) || !(R > 0.0)) throw InvalidArgument("expmap_lipschitz_factor: need kappa >= 0, R > 0");
  const double x = kappa * R;
  if (x < 1e-6) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

struct CoshCheck {
  bool holds = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

// arccosh((1 - l) cosh a + l cosh b) / sqrt((1 - l) a^2 + l b^2) <= sinh(b/2) / (b/2)
// for 0 <= a < b, l in [0, 1]. The argument minus one is formed as
// 2(1 - l) sinh^2(a/2) + 2 l sinh^2(b/2) to avoid cancellation near 1.
inline CoshCheck check_cosh_inequality(double a, double b, double lambda) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) throw InvalidArgument("cosh inequality: need 0 <= a < b < inf");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("cosh inequality: need lambda in [0, 1]");
  CoshCheck out;
  out.rhs = std::sinh(b / 2.0) / (b / 2.0);
  const double den2 = (1.0 - lambda) * a * a + lambda * b * b;
  if (den2 == 0.0) {
    // a = 0, lambda = 0: the limit lambda -> 0 of the left side is the right side.
    out.lhs = out.rhs;
  } else {
    const double sa = std::sinh(a / 2.0), sb = std::sinh(b / 2.0);
    const double x = 2.0 * (1.0 - lambda) * sa * sa + 2.0 * lambda * sb * sb;
    out.lhs = std::log1p(x + std::sqrt(x * (x + 2.0))) / std::sqrt(den2);
  }
  out.slack = out.rhs - out.lhs;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

}  // namespace tspdim
