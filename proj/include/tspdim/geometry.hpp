#pragma once

// Small dense-vector helpers and piecewise curves made of straight segments
// and circular arcs in R^D.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "tspdim/core_types.hpp"

namespace tspdim {

namespace vec {

inline Point zeros(std::size_t n) { return Point(n, 0.0); }

inline Point unit(std::size_t n, std::size_t axis, double sign = 1.0) {
  Point e(n, 0.0);
  e[axis] = sign;
  return e;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Point add(std::span<const double> a, std::span<const double> b) {
  Point r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline Point sub(std::span<const double> a, std::span<const double> b) {
  Point r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline Point scale(std::span<const double> a, double s) {
  Point r(a.begin(), a.end());
  for (double& x : r) x *= s;
  return r;
}

// a + s * b
inline Point axpy(std::span<const double> a, double s, std::span<const double> b) {
  Point r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
  return r;
}

inline Point combine(double sa, std::span<const double> a, double sb, std::span<const double> b) {
  Point r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = sa * a[i] + sb * b[i];
  return r;
}

// |a x b| for vectors of any dimension, via the Lagrange identity written as
// a sum of squared 2x2 minors (no cancellation between |a|^2|b|^2 and (a.b)^2).
inline double cross_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double m = a[i] * b[j] - a[j] * b[i];
      s += m * m;
    }
  return std::sqrt(s);
}

// Radius of the circle through three points; +inf when collinear.
inline double circumradius(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  const Point ab = sub(b, a), ac = sub(c, a), bc = sub(c, b);
  const double area2 = cross_norm(ab, ac);
  if (area2 == 0.0) return kInf;
  return norm(ab) * norm(ac) * norm(bc) / (2.0 * area2);
}

// Orthonormal basis of the complement of unit vector t, by Gram-Schmidt over
// the coordinate axes.
inline std::vector<Point> normal_basis(std::span<const double> t) {
  const std::size_t n = t.size();
  std::vector<Point> basis;
  for (std::size_t axis = 0; axis < n && basis.size() + 1 < n; ++axis) {
    Point e = unit(n, axis);
    e = axpy(e, -dot(e, t), t);
    for (const auto& b : basis) e = axpy(e, -dot(e, b), b);
    const double len = norm(e);
    if (len > 1e-8) basis.push_back(scale(e, 1.0 / len));
  }
  return basis;
}

}  // namespace vec

struct Segment {
  Point from, to;
};

// center + radius * (cos t * u + sin t * v), t in [0, sweep]; u, v orthonormal.
struct Arc {
  Point center, u, v;
  double radius = 0.0;
  double sweep = 0.0;
};

enum class PieceRole { slot, connector_arc, connector_segment, straight_connector, turn, cap, other };

struct CurvePiece {
  std::variant<Segment, Arc> shape;
  PieceRole role = PieceRole::other;

  double length() const {
    if (const auto* s = std::get_if<Segment>(&shape)) return vec::norm(vec::sub(s->to, s->from));
    const auto& a = std::get<Arc>(shape);
    return a.radius * a.sweep;
  }

  bool is_arc() const { return std::holds_alternative<Arc>(shape); }

  Point point(double local) const {
    if (const auto* s = std::get_if<Segment>(&shape)) {
      const double len = length();
      const double f = len > 0.0 ? std::clamp(local / len, 0.0, 1.0) : 0.0;
      return vec::combine(1.0 - f, s->from, f, s->to);
    }
    const auto& a = std::get<Arc>(shape);
    const double t = std::clamp(local / a.radius, 0.0, a.sweep);
    return vec::add(a.center, vec::combine(a.radius * std::cos(t), a.u, a.radius * std::sin(t), a.v));
  }

  Point tangent(double local) const {
    if (const auto* s = std::get_if<Segment>(&shape)) {
      const Point d = vec::sub(s->to, s->from);
      return vec::scale(d, 1.0 / vec::norm(d));
    }
    const auto& a = std::get<Arc>(shape);
    const double t = std::clamp(local / a.radius, 0.0, a.sweep);
    return vec::combine(-std::sin(t), a.u, std::cos(t), a.v);
  }

  Point start() const { return point(0.0); }
  Point end() const { return point(length()); }
  Point start_tangent() const { return tangent(0.0); }
  Point end_tangent() const { return tangent(length()); }
};

// Arclength-parametrized concatenation of pieces.
class PiecewiseCurve {
 public:
  struct Vertex {
    Point p;
    double s = 0.0;
    std::size_t piece = 0;
  };

  PiecewiseCurve() = default;

  explicit PiecewiseCurve(std::vector<CurvePiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvalidArgument("curve: no pieces");
    offsets_.reserve(pieces_.size() + 1);
    offsets_.push_back(0.0);
    for (const auto& p : pieces_) offsets_.push_back(offsets_.back() + p.length());
  }

  std::size_t dim() const { return pieces_.front().start().size(); }
  double length() const { return offsets_.back(); }
  std::span<const CurvePiece> pieces() const { return pieces_; }
  double piece_offset(std::size_t i) const { return offsets_[i]; }

  std::pair<std::size_t, double> locate(double s) const {
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s);
    std::size_t i = static_cast<std::size_t>(std::distance(offsets_.begin(), it));
    i = i == 0 ? 0 : std::min(i - 1, pieces_.size() - 1);
    return {i, s - offsets_[i]};
  }

  Point point_at(double s) const {
    const auto [i, local] = locate(s);
    return pieces_[i].point(local);
  }

  Point tangent_at(double s) const {
    const auto [i, local] = locate(s);
    return pieces_[i].tangent(local);
  }

  // Every piece split into equal steps of at most max_step (arcs into at
  // least two). Junction points appear once.
  std::vector<Vertex> discretize(double max_step) const {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& pc = pieces_[i];
      const double len = pc.length();
      std::size_t parts = static_cast<std::size_t>(std::ceil(len / max_step));
      if (pc.is_arc()) parts = std::max<std::size_t>(parts, 2);
      parts = std::max<std::size_t>(parts, 1);
      for (std::size_t k = (i == 0 ? 0 : 1); k <= parts; ++k) {
        const double local = len * static_cast<double>(k) / static_cast<double>(parts);
        out.push_back({pc.point(local), offsets_[i] + local, i});
      }
    }
    return out;
  }

  PiecewiseCurve translated(std::span<const double> shift) const {
    std::vector<CurvePiece> moved = pieces_;
    for (auto& pc : moved) {
      if (auto* s = std::get_if<Segment>(&pc.shape)) {
        s->from = vec::add(s->from, shift);
        s->to = vec::add(s->to, shift);
      } else {
        auto& a = std::get<Arc>(pc.shape);
        a.center = vec::add(a.center, shift);
      }
    }
    return PiecewiseCurve(std::move(moved));
  }

 private:
  std::vector<CurvePiece> pieces_;
  std::vector<double> offsets_;
};

// Full circle of radius r in the (axis0, axis1) plane of R^dim.
inline PiecewiseCurve circle_curve(double r, std::size_t dim = 2) {
  Arc a{vec::zeros(dim), vec::unit(dim, 0), vec::unit(dim, 1), r, 2.0 * std::numbers::pi};
  return PiecewiseCurve({CurvePiece{a, PieceRole::other}});
}

inline PiecewiseCurve segment_curve(Point from, Point to) {
  return PiecewiseCurve({CurvePiece{Segment{std::move(from), std::move(to)}, PieceRole::other}});
}

}  // namespace tspdim
