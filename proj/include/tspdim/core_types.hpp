#pragma once

// Shared vocabulary: point clouds, class regularity parameters, estimator
// thresholds and seeded randomness.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tspdim {

// Error taxonomy. The CLI maps these onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A geometric construction cannot be realized for the requested parameters.
class InfeasibleConstruction : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Point = std::vector<double>;

// ---------------------------------------------------------------------------
// Randomness

struct Seed {
  std::uint64_t value = 0;
  friend bool operator==(Seed, Seed) = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child stream for (seed, index); used to partition the seed space across
// trials so results do not depend on evaluation order.
inline Seed derive(Seed s, std::uint64_t index) {
  return Seed{splitmix64(splitmix64(s.value) ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

template <typename... Rest>
Seed derive(Seed s, std::uint64_t index, Rest... rest) {
  return derive(derive(s, index), static_cast<std::uint64_t>(rest)...);
}

using Rng = std::mt19937_64;

inline Rng make_rng(Seed s) {
  std::seed_seq seq{static_cast<std::uint32_t>(s.value), static_cast<std::uint32_t>(s.value >> 32)};
  return Rng(seq);
}

// ---------------------------------------------------------------------------
// Point clouds

struct CloudMeta {
  std::string sampler = "unknown";
  Seed seed{};
  std::optional<int> true_dim;
  double K_I = 1.0;
};

// n points in R^m stored row-major. Immutable after construction.
class PointCloud {
 public:
  PointCloud(std::size_t m, std::vector<double> coords, CloudMeta meta = {})
      : m_(m), coords_(std::move(coords)), meta_(std::move(meta)) {
    if (m_ == 0) throw InvalidArgument("point cloud: ambient dimension must be >= 1");
    if (coords_.empty() || coords_.size() % m_ != 0)
      throw InvalidArgument("point cloud: need n >= 1 points of identical length m");
    if (!(meta_.K_I >= 1.0)) throw InvalidArgument("point cloud: K_I must be >= 1");
    for (double x : coords_) {
      if (!std::isfinite(x) || std::abs(x) > meta_.K_I)
        throw InvalidArgument("point cloud: coordinate outside [-K_I, K_I]");
    }
  }

  static PointCloud from_points(const std::vector<Point>& pts, CloudMeta meta = {}) {
    if (pts.empty()) throw InvalidArgument("point cloud: need n >= 1 points");
    const std::size_t m = pts.front().size();
    std::vector<double> flat;
    flat.reserve(pts.size() * m);
    for (const auto& p : pts) {
      if (p.size() != m) throw InvalidArgument("point cloud: ragged points");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return PointCloud(m, std::move(flat), std::move(meta));
  }

  std::size_t size() const { return coords_.size() / m_; }
  std::size_t dim() const { return m_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * m_, m_}; }
  std::span<const double> coords() const { return coords_; }
  const CloudMeta& meta() const { return meta_; }

  PointCloud scaled(double lambda) const {
    std::vector<double> c = coords_;
    for (double& x : c) x *= lambda;
    CloudMeta meta = meta_;
    meta.K_I = std::max(meta.K_I, meta.K_I * std::abs(lambda));
    return PointCloud(m_, std::move(c), std::move(meta));
  }

 private:
  std::size_t m_;
  std::vector<double> coords_;
  CloudMeta meta_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

inline double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

// ||a - b||^d, evaluated without a square root when d is even.
inline double power_distance(std::span<const double> a, std::span<const double> b, int d) {
  const double sq = squared_distance(a, b);
  if (d % 2 == 0) return ipow(sq, d / 2);
  return ipow(std::sqrt(sq), d);
}

// ---------------------------------------------------------------------------
// Regularity class

// Constants (tau_g, tau_l, K_I, K_v, K_p, m) of the distribution class.
// tau_g / tau_l may be +inf.
struct RegularityParams {
  double tau_g = kInf;
  double tau_l = kInf;
  double K_I = 1.0;
  double K_v = 0.25;
  double K_p = 4.0;
  int m = 2;

  // Loosest valid constants for the given ambient dimension.
  static RegularityParams defaults(int m, double K_I = 1.0, double tau_g = kInf, double tau_l = kInf) {
    RegularityParams p;
    p.m = m;
    p.K_I = K_I;
    p.tau_g = tau_g;
    p.tau_l = tau_l;
    p.K_v = std::ldexp(1.0, -m);
    p.K_p = std::pow(2.0 * K_I, m);
    return p;
  }
};

// Volume of the unit ball in R^d; omega_0 = 1, omega_1 = 2.
inline double unit_ball_volume(int d) {
  if (d < 0) throw InvalidArgument("unit_ball_volume: d must be >= 0");
  // omega_d = 2 pi / d * omega_{d-2}
  double w = (d % 2 == 0) ? 1.0 : 2.0;
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) w *= 2.0 * std::numbers::pi / k;
  return w;
}

// Range violations of the class constants; empty iff every range holds.
inline std::vector<std::string> validate_params(const RegularityParams& p) {
  std::vector<std::string> out;
  if (p.m < 1) {
    out.emplace_back("m >= 1");
    return out;
  }
  if (!(p.tau_g > 0.0)) out.emplace_back("tau_g in (0, inf]");
  if (!(p.tau_l > 0.0)) out.emplace_back("tau_l in (0, inf]");
  if (!(p.tau_g <= p.tau_l)) out.emplace_back("tau_g <= tau_l");
  if (!(p.K_I >= 1.0) || std::isinf(p.K_I)) out.emplace_back("K_I in [1, inf)");
  const double kv_max = std::ldexp(1.0, -p.m);
  if (!(p.K_v > 0.0 && p.K_v <= kv_max)) out.emplace_back("K_v in (0, 2^-m]");
  if (!(p.K_p >= std::pow(2.0 * p.K_I, p.m))) out.emplace_back("K_p >= (2 K_I)^m");
  return out;
}

// ---------------------------------------------------------------------------
// Estimator configuration

struct CalibrationRecord {
  enum class Kind { user_supplied, calibrated };
  Kind kind = Kind::user_supplied;
  Seed seed{};
  std::size_t trials = 0;
  double safety = 1.0;
  std::vector<std::size_t> n_values;
  std::map<int, std::string> reference_samplers;
  std::map<int, double> observed_max;
};

// Threshold L_d per candidate dimension d = 1..m. L_m may be +inf: the top
// dimension is the fallback answer and needs no reference sampler.
struct EstimatorConfig {
  int m = 0;
  std::map<int, double> thresholds;
  CalibrationRecord calibration;

  double threshold(int d) const {
    auto it = thresholds.find(d);
    if (it == thresholds.end()) throw InvalidArgument("estimator config: no threshold for d=" + std::to_string(d));
    return it->second;
  }

  void validate() const {
    if (m < 1) throw InvalidArgument("estimator config: m must be >= 1");
    for (int d = 1; d <= m; ++d) {
      auto it = thresholds.find(d);
      if (it == thresholds.end()) throw InvalidArgument("estimator config: missing threshold for d=" + std::to_string(d));
      if (!(it->second > 0.0)) throw InvalidArgument("estimator config: thresholds must be positive");
    }
  }

  static EstimatorConfig user_supplied(int m, std::map<int, double> thresholds) {
    EstimatorConfig c;
    c.m = m;
    c.thresholds = std::move(thresholds);
    c.validate();
    return c;
  }
};

}  // namespace tspdim
