#pragma once

// Hilbert space-filling curve on [-r, r]^d at finite depth k, and its
// discrete right inverse. The curve is the polygon through the 2^{kd}
// subcell centres in Hilbert order, extended at both ends to the cube
// corners of the first and last subcells, so psi(0) and psi(1) are corners.
// Parameter s of subcell h is (h + 1/2) / 2^{kd}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "tspdim/core_types.hpp"

namespace tspdim {

namespace hilbert {

// Skilling, "Programming the Hilbert curve" (2004). X holds one b-bit
// coordinate per axis and is transformed in place.
inline void axes_to_transpose(std::span<std::uint32_t> X, int b) {
  const int n = static_cast<int>(X.size());
  const std::uint32_t M = std::uint32_t{1} << (b - 1);
  for (std::uint32_t Q = M; Q > 1; Q >>= 1) {
    const std::uint32_t P = Q - 1;
    for (int i = 0; i < n; ++i) {
      if (X[i] & Q) {
        X[0] ^= P;
      } else {
        const std::uint32_t t = (X[0] ^ X[i]) & P;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
  for (int i = 1; i < n; ++i) X[i] ^= X[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t Q = M; Q > 1; Q >>= 1)
    if (X[n - 1] & Q) t ^= Q - 1;
  for (int i = 0; i < n; ++i) X[i] ^= t;
}

inline void transpose_to_axes(std::span<std::uint32_t> X, int b) {
  const int n = static_cast<int>(X.size());
  const std::uint32_t N = std::uint32_t{2} << (b - 1);
  std::uint32_t t = X[n - 1] >> 1;
  for (int i = n - 1; i > 0; --i) X[i] ^= X[i - 1];
  X[0] ^= t;
  for (std::uint32_t Q = 2; Q != N; Q <<= 1) {
    const std::uint32_t P = Q - 1;
    for (int i = n - 1; i >= 0; --i) {
      if (X[i] & Q) {
        X[0] ^= P;
      } else {
        t = (X[0] ^ X[i]) & P;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
}

// Interleave the transpose form into a single index, most significant bit
// of axis 0 first.
inline std::uint64_t transpose_to_index(std::span<const std::uint32_t> X, int b) {
  std::uint64_t h = 0;
  for (int q = b - 1; q >= 0; --q)
    for (std::uint32_t x : X) h = (h << 1) | ((x >> q) & 1u);
  return h;
}

inline void index_to_transpose(std::uint64_t h, std::span<std::uint32_t> X, int b) {
  const int n = static_cast<int>(X.size());
  std::fill(X.begin(), X.end(), 0u);
  int bit = b * n - 1;
  for (int q = b - 1; q >= 0; --q)
    for (int i = 0; i < n; ++i, --bit) X[i] |= static_cast<std::uint32_t>((h >> bit) & 1u) << q;
}

inline std::uint64_t encode(std::vector<std::uint32_t> cell, int b) {
  axes_to_transpose(cell, b);
  return transpose_to_index(cell, b);
}

inline std::vector<std::uint32_t> decode(std::uint64_t h, int dim, int b) {
  std::vector<std::uint32_t> X(static_cast<std::size_t>(dim));
  index_to_transpose(h, X, b);
  transpose_to_axes(X, b);
  return X;
}

}  // namespace hilbert

class SpaceFillingCurve {
 public:
  static int default_depth(int dim) { return dim <= 3 ? 10 : 6; }

  SpaceFillingCurve(int dim, int depth, double half_width = 1.0) : dim_(dim), depth_(depth), r_(half_width) {
    if (dim_ < 1) throw InvalidArgument("space-filling curve: dim must be >= 1");
    if (depth_ < 1 || depth_ > 31) throw InvalidArgument("space-filling curve: depth must be in [1, 31]");
    if (dim_ * depth_ > 52) throw InvalidArgument("space-filling curve: dim * depth must be <= 52");
    if (!(r_ > 0.0) || !std::isfinite(r_)) throw InvalidArgument("space-filling curve: half-width must be positive");
  }

  explicit SpaceFillingCurve(int dim) : SpaceFillingCurve(dim, default_depth(dim)) {}

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  double half_width() const { return r_; }
  std::uint64_t cells() const { return std::uint64_t{1} << (dim_ * depth_); }
  std::uint32_t side() const { return std::uint32_t{1} << depth_; }

  double grid_parameter(std::uint64_t h) const { return (static_cast<double>(h) + 0.5) / static_cast<double>(cells()); }

  Point cell_center(std::uint64_t h) const {
    const auto X = hilbert::decode(h, dim_, depth_);
    Point p(static_cast<std::size_t>(dim_));
    const double cell = 2.0 * r_ / side();
    for (int i = 0; i < dim_; ++i) p[i] = -r_ + (X[i] + 0.5) * cell;
    return p;
  }

  std::uint64_t cell_index(std::span<const double> p) const {
    check_point(p);
    std::vector<std::uint32_t> X(static_cast<std::size_t>(dim_));
    const double scale = side() / (2.0 * r_);
    for (int i = 0; i < dim_; ++i) {
      const double c = std::floor((p[i] + r_) * scale);
      X[i] = static_cast<std::uint32_t>(std::clamp(c, 0.0, static_cast<double>(side() - 1)));
    }
    return hilbert::encode(std::move(X), depth_);
  }

  Point eval(double s) const {
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("space-filling curve: parameter outside [0, 1]");
    if (dim_ == 1) return {r_ * (2.0 * s - 1.0)};
    const double total = static_cast<double>(cells());
    const double t = s * total;
    if (t <= 0.5) return lerp(corner_of(cell_center(0)), cell_center(0), t / 0.5);
    if (t >= total - 0.5) {
      const Point last = cell_center(cells() - 1);
      return lerp(last, corner_of(last), (t - (total - 0.5)) / 0.5);
    }
    const double u = t - 0.5;
    auto h = static_cast<std::uint64_t>(std::floor(u));
    if (h >= cells() - 1) h = cells() - 2;
    return lerp(cell_center(h), cell_center(h + 1), u - static_cast<double>(h));
  }

  // Right inverse at resolution k: eval(index(p)) is within one cell of p.
  double index(std::span<const double> p) const {
    check_point(p);
    if (dim_ == 1) return (p[0] / r_ + 1.0) / 2.0;
    return grid_parameter(cell_index(p));
  }

 private:
  void check_point(std::span<const double> p) const {
    if (p.size() != static_cast<std::size_t>(dim_)) throw InvalidArgument("space-filling curve: dimension mismatch");
    for (double x : p)
      if (!(std::abs(x) <= r_)) throw InvalidArgument("space-filling curve: point outside cube");
  }

  Point corner_of(const Point& centre) const {
    Point c(centre.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = centre[i] < 0.0 ? -r_ : r_;
    return c;
  }

  static Point lerp(const Point& a, const Point& b, double f) {
    Point p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] + f * (b[i] - a[i]);
    return p;
  }

  int dim_;
  int depth_;
  double r_;
};

// Permutation sorting points by curve index; ties keep the original order.
inline std::vector<std::size_t> spacefill_order(const PointCloud& cloud, const SpaceFillingCurve& curve) {
  if (cloud.dim() != static_cast<std::size_t>(curve.dim()))
    throw InvalidArgument("spacefill_order: cloud and curve dimensions differ");
  std::vector<double> key(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) key[i] = curve.index(cloud.point(i));
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return order;
}

}  // namespace tspdim
