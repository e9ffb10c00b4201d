#pragma once

// Path-length dimension estimators. The statistic at candidate dimension d is
// the minimal d-power open-path length; a d-dimensional sample keeps it
// bounded, while higher-dimensional samples push it to infinity.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "tspdim/core_types.hpp"
#include "tspdim/manifolds.hpp"
#include "tspdim/pathlen.hpp"

namespace tspdim {

struct DimensionEstimate {
  int d_hat = 1;
  std::map<int, double> statistic;   // per evaluated candidate d
  std::map<int, double> thresholds;  // thresholds consulted
  std::map<int, bool> exact;         // statistic came from the exact solver
  bool exhausted = false;            // no threshold fired; d_hat fell back to m
  // Some heuristic statistic stayed above its threshold, so the decision
  // could not be certified against the true minimum.
  bool uncertified = false;
};

namespace detail {

// Statistic at power d, with one refinement pass (4x restarts) when the
// heuristic lands above the threshold. The heuristic never undercuts the true
// minimum, so a value <= threshold is a certificate.
inline PowerPath statistic_path(const PointCloud& cloud, int d, double threshold, Seed seed) {
  PowerPath path = min_power_path(cloud, d, seed);
  if (path.exact || path.length <= threshold) return path;
  PowerPath refined = min_power_path_heuristic(cloud, d, derive(seed, 0x5EF1), 4 * default_restarts(cloud.size()));
  return refined.length < path.length ? refined : path;
}

}  // namespace detail

// d_hat = d1 iff the d1-power statistic is <= L_{d1}; d2 otherwise.
inline DimensionEstimate estimate_binary(const PointCloud& cloud, int d1, int d2, const EstimatorConfig& cfg, Seed seed) {
  const int m = static_cast<int>(cloud.dim());
  if (d1 < 1 || d2 <= d1 || d2 > m) throw InvalidArgument("estimate_binary: need 1 <= d1 < d2 <= m");
  const double L = cfg.threshold(d1);
  const PowerPath path = detail::statistic_path(cloud, d1, L, derive(seed, static_cast<std::uint64_t>(d1)));
  DimensionEstimate out;
  out.statistic[d1] = path.length;
  out.thresholds[d1] = L;
  out.exact[d1] = path.exact;
  if (path.length <= L) {
    out.d_hat = d1;
  } else {
    out.d_hat = d2;
    out.uncertified = !path.exact;
  }
  return out;
}

// d_hat = min{d in 1..m : statistic(d) <= L_d}, or m with exhausted = true.
inline DimensionEstimate estimate_general(const PointCloud& cloud, const EstimatorConfig& cfg, Seed seed) {
  const int m = static_cast<int>(cloud.dim());
  if (cfg.m != m) throw InvalidArgument("estimate_general: config m does not match cloud dimension");
  DimensionEstimate out;
  for (int d = 1; d <= m; ++d) {
    const double L = cfg.threshold(d);
    out.thresholds[d] = L;
    if (std::isinf(L)) {
      // Infinite threshold always fires; the statistic is not needed.
      out.d_hat = d;
      return out;
    }
    const PowerPath path = detail::statistic_path(cloud, d, L, derive(seed, static_cast<std::uint64_t>(d)));
    out.statistic[d] = path.length;
    out.exact[d] = path.exact;
    if (path.length <= L) {
      out.d_hat = d;
      return out;
    }
    if (!path.exact) out.uncertified = true;
  }
  out.d_hat = m;
  out.exhausted = true;
  return out;
}

// L_d = safety * max of the d-power statistic over `trials` clouds per
// configured n drawn from the reference sampler of dimension d. Every
// d in 1..m-1 needs a reference; L_m is +inf unless a reference is given.
inline EstimatorConfig calibrate_thresholds(const RegularityParams& params, const std::map<int, SamplerSpec>& references,
                                            std::vector<std::size_t> n_values, std::size_t trials, double safety,
                                            Seed seed) {
  const int m = params.m;
  if (m < 1) throw InvalidArgument("calibrate: m must be >= 1");
  if (!(safety >= 1.0) || !std::isfinite(safety)) throw InvalidArgument("calibrate: safety must be a finite real >= 1");
  if (trials < 1) throw InvalidArgument("calibrate: trials must be >= 1");
  if (n_values.empty()) throw InvalidArgument("calibrate: need at least one sample size");
  for (std::size_t n : n_values)
    if (n < 1) throw InvalidArgument("calibrate: sample sizes must be >= 1");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());

  EstimatorConfig cfg;
  cfg.m = m;
  cfg.calibration.kind = CalibrationRecord::Kind::calibrated;
  cfg.calibration.seed = seed;
  cfg.calibration.trials = trials;
  cfg.calibration.safety = safety;
  cfg.calibration.n_values = n_values;
  for (int d = 1; d <= m; ++d) {
    auto it = references.find(d);
    if (it == references.end()) {
      if (d == m) {
        cfg.thresholds[d] = kInf;
        continue;
      }
      throw CalibrationError("calibrate: missing reference sampler for d=" + std::to_string(d));
    }
    const SamplerSpec& ref = it->second;
    if (ref.ambient_dim() != m) throw CalibrationError("calibrate: reference sampler for d=" + std::to_string(d) + " is not in R^m");
    if (ref.intrinsic_dim() != d)
      throw CalibrationError("calibrate: reference sampler for d=" + std::to_string(d) + " has intrinsic dimension " +
                             std::to_string(ref.intrinsic_dim()));
    double worst = 0.0;
    for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
      for (std::size_t t = 0; t < trials; ++t) {
        const Seed s = derive(seed, static_cast<std::uint64_t>(d), n_values[ni], t);
        const PointCloud cloud = sample(ref, n_values[ni], derive(s, 0));
        worst = std::max(worst, min_power_path(cloud, d, derive(s, 1)).length);
      }
    }
    cfg.calibration.reference_samplers[d] = ref.name();
    cfg.calibration.observed_max[d] = worst;
    // A positive floor keeps L_d valid when every reference path is empty (n = 1).
    cfg.thresholds[d] = std::max(safety * worst, std::numeric_limits<double>::min());
  }
  cfg.validate();
  return cfg;
}

}  // namespace tspdim
