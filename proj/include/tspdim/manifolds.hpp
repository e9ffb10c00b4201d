#pragma once

// Reach-controlled synthetic distributions: uniform cubes, spheres, products
// with cubes, and the zigzag curve family that threads n thin cylinders T_i
// with curvature-radius-tau_l connectors.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "tspdim/core_types.hpp"
#include "tspdim/geometry.hpp"

namespace tspdim {

// ---------------------------------------------------------------------------
// Zigzag parameters

// Derived quantities of the zigzag family. With k = d2 - d1 transverse
// directions, the cube holds rows = c^k parallel rows, each carrying
// slots_per_row = ceil(n / c^k) cylinder slots of length a separated by
// connector blocks of length b; w is the cylinder radius.
struct ZigzagParams {
  int d1 = 1;
  int d2 = 2;
  std::size_t n_blocks = 1;
  double K_I = 1.0;
  double tau_l = 0.25;

  long c = 0;
  std::size_t rows = 0;
  std::size_t slots_per_row = 0;   // ceil(n / c^k)
  std::size_t floor_blocks = 0;    // floor(n / c^k)
  double a = 0.0;
  double b = 0.0;                  // uses slots_per_row, so the row length identity holds
  double b_floor = 0.0;            // same expression with floor(n / c^k)
  double w = 0.0;

  int codim() const { return d2 - d1; }
  // Dimension of the space the native (d1 = 1) curve lives in.
  int native_dim() const { return d2 - d1 + 1; }

  double row_length() const {
    const double N = static_cast<double>(slots_per_row);
    return 2.0 * tau_l + N * a + (N + 1.0) * b;
  }

  static ZigzagParams make(int d1, int d2, std::size_t n, double K_I, double tau_l) {
    if (d1 < 1 || d2 <= d1) throw InvalidArgument("zigzag: need 1 <= d1 < d2");
    if (n < 1) throw InvalidArgument("zigzag: need n >= 1 blocks");
    if (!(K_I >= 1.0) || !std::isfinite(K_I)) throw InvalidArgument("zigzag: K_I must be in [1, inf)");
    if (!(tau_l > 0.0) || !std::isfinite(tau_l)) throw InvalidArgument("zigzag: tau_l must be positive and finite");
    if (!(2.0 * tau_l <= K_I)) throw InfeasibleConstruction("zigzag: requires 2 tau_l <= K_I");
    ZigzagParams p;
    p.d1 = d1;
    p.d2 = d2;
    p.n_blocks = n;
    p.K_I = K_I;
    p.tau_l = tau_l;
    const int k = d2 - d1;
    p.c = static_cast<long>(std::ceil((K_I + tau_l) / (2.0 * tau_l)));
    double rows = 1.0;
    for (int i = 0; i < k; ++i) rows *= static_cast<double>(p.c);
    if (rows > 1e6) throw InfeasibleConstruction("zigzag: c^(d2-d1) rows is too large to build");
    p.rows = static_cast<std::size_t>(rows);
    p.slots_per_row = (n + p.rows - 1) / p.rows;
    p.floor_blocks = n / p.rows;
    const double shape = k;
    const double half = shape + 0.5;
    const double N = static_cast<double>(p.slots_per_row);
    p.a = (K_I - tau_l) / (half * N);
    p.b = 2.0 * shape * (K_I - tau_l) / (half * (N + 1.0));
    p.b_floor = 2.0 * shape * (K_I - tau_l) / (half * (static_cast<double>(p.floor_blocks) + 1.0));
    p.w = std::min(tau_l, shape * shape * (K_I - tau_l) * (K_I - tau_l) / (2.0 * tau_l * half * half * (N + 1.0) * (N + 1.0)));
    if (!(p.a > 0.0 && p.b > 0.0 && p.w > 0.0)) throw InfeasibleConstruction("zigzag: derived sizes not positive");
    if (p.b < 2.0 * std::sqrt(2.0 * p.w * tau_l) * (1.0 - 1e-12))
      throw InfeasibleConstruction("zigzag: b < 2 sqrt(2 w tau_l)");
    return p;
  }
};

// Connector arc angle for a lateral drop of p - q over a block of length b:
// arc (radius tau_l) - cotangent segment - arc. Evaluated as
// 2 asin(sqrt((1 - x) / 2)) with 1 - x in cancellation-free form, which equals
// arccos(x) for the closed-form ratio x.
inline double connector_t0(double p_off, double q_off, double b, double tau_l) {
  if (q_off > p_off) std::swap(p_off, q_off);
  if (!(b > 0.0) || !(tau_l > 0.0)) throw InvalidArgument("connector_t0: b and tau_l must be positive");
  const double delta = p_off - q_off;
  const double radicand = b * b - delta * (4.0 * tau_l - delta);
  if (radicand < 0.0) throw InfeasibleConstruction("connector_t0: negative radicand (offset drop too large for b)");
  if (delta == 0.0) return 0.0;
  const double e = 2.0 * tau_l - delta;
  const double den = b * b + e * e;
  const double s = 2.0 * tau_l * delta - delta * delta;
  const double A = b * b - s;
  const double B = b * std::sqrt(radicand);
  const double one_minus_x = (s * s + b * b * delta * delta) / ((A + B) * den);
  return 2.0 * std::asin(std::sqrt(std::clamp(one_minus_x / 2.0, 0.0, 1.0)));
}

// Literal closed form, kept for cross-checking connector_t0.
inline double connector_t0_arccos(double p_off, double q_off, double b, double tau_l) {
  if (q_off > p_off) std::swap(p_off, q_off);
  const double delta = p_off - q_off;
  const double radicand = b * b - delta * (4.0 * tau_l - delta);
  if (radicand < 0.0) throw InfeasibleConstruction("connector_t0: negative radicand");
  const double num = 2.0 * tau_l * (2.0 * tau_l - delta) + b * std::sqrt(radicand);
  const double den = b * b + (2.0 * tau_l - delta) * (2.0 * tau_l - delta);
  return std::acos(std::clamp(num / den, -1.0, 1.0));
}

// cos t (q - p + 2 tau (1 - cos t)) + sin t (b - 2 tau sin t); zero when the
// middle segment is cotangent to both arcs.
inline double tangency_residual(double p_off, double q_off, double b, double tau_l, double t0) {
  if (q_off > p_off) std::swap(p_off, q_off);
  return std::cos(t0) * (q_off - p_off + 2.0 * tau_l * (1.0 - std::cos(t0))) +
         std::sin(t0) * (b - 2.0 * tau_l * std::sin(t0));
}

// ---------------------------------------------------------------------------
// Layout

// x = origin + sum_j local[j] * axes[j]; axes orthonormal.
struct Isometry {
  Point origin;
  std::vector<Point> axes;

  Point apply(std::span<const double> local) const {
    Point p = origin;
    for (std::size_t j = 0; j < axes.size(); ++j) p = vec::axpy(p, local[j], axes[j]);
    return p;
  }

  Point inverse(std::span<const double> x) const {
    const Point d = vec::sub(x, origin);
    Point local(axes.size());
    for (std::size_t j = 0; j < axes.size(); ++j) local[j] = vec::dot(d, axes[j]);
    return local;
  }
};

enum class BlockKind { slot, connector, turn, cap };

// One block of the layout. Slot blocks are [0, extent] x B(0, w) in the
// frame (axis 0 along the row); slot_index >= 0 marks T_{slot_index + 1},
// -1 a spare slot beyond n.
struct LayoutBlock {
  BlockKind kind = BlockKind::slot;
  std::size_t row = 0;
  long slot_index = -1;
  Isometry frame;
  double extent = 0.0;
};

struct ZigzagLayout {
  ZigzagParams params;
  std::vector<LayoutBlock> blocks;        // traversal order
  std::vector<std::size_t> t_blocks;      // blocks index of T_1..T_n
  std::vector<Point> row_origin;          // row centre line at the row start
  std::vector<Point> row_direction;       // +-e_0
  std::vector<std::size_t> turn_axis;     // transverse axis changed after row r
  std::vector<double> turn_sign;
  Point start_cap_outward, end_cap_outward;

  std::size_t dim() const { return static_cast<std::size_t>(params.native_dim()); }
};

namespace detail {

// Boustrophedon (reflected mixed-radix) digits of row r over a c^k grid:
// consecutive rows differ by one step in exactly one transverse axis.
inline std::vector<long> row_digits(std::size_t r, long c, int k) {
  std::vector<long> dig(static_cast<std::size_t>(k));
  std::size_t block = 1;
  for (int j = 0; j < k; ++j) {
    const std::size_t q = r / block;
    long digit = static_cast<long>(q % static_cast<std::size_t>(c));
    if ((q / static_cast<std::size_t>(c)) % 2 == 1) digit = c - 1 - digit;
    dig[static_cast<std::size_t>(j)] = digit;
    block *= static_cast<std::size_t>(c);
  }
  return dig;
}

}  // namespace detail

inline ZigzagLayout zigzag_layout(const ZigzagParams& p) {
  if (!(2.0 * p.tau_l <= p.K_I)) throw InfeasibleConstruction("zigzag: requires 2 tau_l <= K_I");
  const int k = p.codim();
  const std::size_t D = static_cast<std::size_t>(k + 1);
  const double tau = p.tau_l, K = p.K_I;
  ZigzagLayout L;
  L.params = p;
  const std::size_t N = p.slots_per_row;
  std::vector<std::vector<long>> digits;
  for (std::size_t r = 0; r < p.rows; ++r) digits.push_back(detail::row_digits(r, p.c, k));

  for (std::size_t r = 0; r < p.rows; ++r) {
    const double dir = (r % 2 == 0) ? 1.0 : -1.0;
    Point origin(D, 0.0);
    origin[0] = -dir * (K - tau);
    for (int j = 0; j < k; ++j) origin[static_cast<std::size_t>(j) + 1] = -static_cast<double>(p.c - 1) * tau + 2.0 * tau * static_cast<double>(digits[r][static_cast<std::size_t>(j)]);
    const Point along = vec::unit(D, 0, dir);
    std::vector<Point> axes{along};
    for (std::size_t j = 1; j < D; ++j) axes.push_back(vec::unit(D, j));
    L.row_origin.push_back(origin);
    L.row_direction.push_back(along);

    if (r == 0) {
      LayoutBlock cap{BlockKind::cap, r, -1, Isometry{vec::axpy(origin, -tau, along), axes}, tau};
      L.blocks.push_back(cap);
    }
    double u = 0.0;
    for (std::size_t j = 0; j <= N; ++j) {
      L.blocks.push_back({BlockKind::connector, r, -1, Isometry{vec::axpy(origin, u, along), axes}, p.b});
      u += p.b;
      if (j == N) break;
      const std::size_t global = r * N + j;
      const long idx = global < p.n_blocks ? static_cast<long>(global) : -1;
      if (idx >= 0) L.t_blocks.push_back(L.blocks.size());
      L.blocks.push_back({BlockKind::slot, r, idx, Isometry{vec::axpy(origin, u, along), axes}, p.a});
      u += p.a;
    }
    const Point row_end = vec::axpy(origin, u, along);
    if (r + 1 < p.rows) {
      std::size_t axis = 0;
      double sign = 1.0;
      for (int j = 0; j < k; ++j) {
        const long diff = digits[r + 1][static_cast<std::size_t>(j)] - digits[r][static_cast<std::size_t>(j)];
        if (diff != 0) {
          axis = static_cast<std::size_t>(j) + 1;
          sign = diff > 0 ? 1.0 : -1.0;
        }
      }
      L.turn_axis.push_back(axis);
      L.turn_sign.push_back(sign);
      L.blocks.push_back({BlockKind::turn, r, -1, Isometry{row_end, axes}, tau});
    } else {
      L.blocks.push_back({BlockKind::cap, r, -1, Isometry{row_end, axes}, tau});
    }
  }
  // Caps bend outward along the first transverse axis; rows at the ends of
  // the snake sit on the boundary layer of that axis.
  L.start_cap_outward = vec::unit(D, 1, -1.0);
  const long last_digit = digits.back()[0];
  L.end_cap_outward = vec::unit(D, 1, last_digit == p.c - 1 ? 1.0 : -1.0);
  return L;
}

// ---------------------------------------------------------------------------
// Zigzag manifold

struct ConnectorInfo {
  std::size_t row = 0;
  double drop = 0.0;  // |Y_next - Y_prev|
  double t0 = 0.0;
  double residual = 0.0;
};

class ZigzagManifold {
 public:
  static constexpr const char* kEndCapModel = "quarter_arc_radius_tau_l";

  // offsets: one vector in R^(d2 - d1) per T block, each of norm < w. An
  // empty list means all offsets zero.
  static ZigzagManifold build(const ZigzagParams& params, std::vector<Point> offsets = {}) {
    if (params.d1 != 1) throw InvalidArgument("zigzag_build: native construction needs d1 = 1; lift with product_with_cube");
    const std::size_t k = static_cast<std::size_t>(params.codim());
    if (offsets.empty()) offsets.assign(params.n_blocks, Point(k, 0.0));
    if (offsets.size() != params.n_blocks) throw InvalidArgument("zigzag_build: need one offset per block");
    for (const auto& y : offsets) {
      if (y.size() != k) throw InvalidArgument("zigzag_build: offset dimension must be d2 - d1");
      if (!(vec::norm(y) < params.w)) throw InvalidArgument("zigzag_build: offset outside B(0, w)");
    }
    ZigzagManifold M;
    M.layout_ = zigzag_layout(params);
    M.offsets_ = std::move(offsets);
    M.assemble();
    return M;
  }

  const ZigzagParams& params() const { return layout_.params; }
  const ZigzagLayout& layout() const { return layout_; }
  const PiecewiseCurve& curve() const { return curve_; }
  std::span<const Point> offsets() const { return offsets_; }
  std::span<const ConnectorInfo> connectors() const { return connectors_; }
  std::size_t dim() const { return layout_.dim(); }

  const LayoutBlock& t_block(std::size_t i) const { return layout_.blocks[layout_.t_blocks.at(i)]; }

  // Phi_i(t, Y_i), t in [0, a].
  Point slice_point(std::size_t i, double t) const {
    Point local{t};
    local.insert(local.end(), offsets_[i].begin(), offsets_[i].end());
    return t_block(i).frame.apply(local);
  }

  bool in_t_block(std::size_t i, std::span<const double> x) const {
    const auto local = t_block(i).frame.inverse(x);
    if (local[0] < 0.0 || local[0] > params().a) return false;
    double r2 = 0.0;
    for (std::size_t j = 1; j < local.size(); ++j) r2 += local[j] * local[j];
    return std::sqrt(r2) < params().w;
  }

  // Largest angle (radians) between consecutive piece tangents.
  double max_junction_angle() const {
    double worst = 0.0;
    const auto pcs = curve_.pieces();
    for (std::size_t i = 0; i + 1 < pcs.size(); ++i)
      worst = std::max(worst, vec::norm(vec::sub(pcs[i].end_tangent(), pcs[i + 1].start_tangent())));
    return worst;
  }

 private:
  Point slot_offset_vector(std::size_t global_slot) const {
    const std::size_t D = dim();
    Point v(D, 0.0);
    if (global_slot < offsets_.size())
      for (std::size_t j = 1; j < D; ++j) v[j] = offsets_[global_slot][j - 1];
    return v;
  }

  void add(CurvePiece pc) {
    if (pc.length() > 0.0) pieces_.push_back(std::move(pc));
  }

  void add_connector(const Point& origin, const Point& dir, const Point& y_prev, const Point& y_next, std::size_t row) {
    const auto& p = params();
    const double tau = p.tau_l;
    const Point P = vec::add(origin, y_prev);
    const Point Q = vec::add(vec::axpy(origin, p.b, dir), y_next);
    const Point delta = vec::sub(y_next, y_prev);
    const double drop = vec::norm(delta);
    ConnectorInfo info{row, drop, 0.0, 0.0};
    if (drop == 0.0) {
      add({Segment{P, Q}, PieceRole::straight_connector});
      connectors_.push_back(info);
      return;
    }
    const Point e = vec::scale(delta, 1.0 / drop);
    const double t0 = connector_t0(drop, 0.0, p.b, tau);
    info.t0 = t0;
    info.residual = tangency_residual(drop, 0.0, p.b, tau, t0);
    if (p.b - 2.0 * tau * std::sin(t0) <= 0.0) throw InfeasibleConstruction("zigzag: connector arcs overlap");
    const double st = std::sin(t0), ct = std::cos(t0);
    Arc c1{vec::axpy(P, tau, e), vec::scale(e, -1.0), dir, tau, t0};
    Arc c2{vec::axpy(Q, -tau, e), vec::combine(ct, e, -st, dir), vec::combine(st, e, ct, dir), tau, t0};
    const Point c1_end = vec::add(vec::axpy(P, tau * st, dir), vec::scale(e, tau * (1.0 - ct)));
    const Point c2_start = vec::sub(vec::axpy(Q, -tau * st, dir), vec::scale(e, tau * (1.0 - ct)));
    add({c1, PieceRole::connector_arc});
    add({Segment{c1_end, c2_start}, PieceRole::connector_segment});
    add({c2, PieceRole::connector_arc});
    connectors_.push_back(info);
  }

  void assemble() {
    const auto& L = layout_;
    const auto& p = params();
    const double tau = p.tau_l;
    const std::size_t N = p.slots_per_row;
    const double half_pi = std::numbers::pi / 2.0;
    for (std::size_t r = 0; r < p.rows; ++r) {
      const Point& origin = L.row_origin[r];
      const Point& dir = L.row_direction[r];
      if (r == 0) {
        // quarter arc arriving at the row start with tangent dir
        const Point& o = L.start_cap_outward;
        add({Arc{vec::axpy(origin, tau, o), vec::scale(dir, -1.0), vec::scale(o, -1.0), tau, half_pi}, PieceRole::cap});
      }
      double u = 0.0;
      Point y_prev = vec::zeros(dim());
      for (std::size_t j = 0; j <= N; ++j) {
        const Point y_next = j < N ? slot_offset_vector(r * N + j) : vec::zeros(dim());
        add_connector(vec::axpy(origin, u, dir), dir, y_prev, y_next, r);
        u += p.b;
        if (j == N) break;
        const Point s0 = vec::add(vec::axpy(origin, u, dir), y_next);
        add({Segment{s0, vec::axpy(s0, p.a, dir)}, PieceRole::slot});
        u += p.a;
        y_prev = y_next;
      }
      const Point row_end = vec::axpy(origin, u, dir);
      if (r + 1 < p.rows) {
        const Point s = vec::unit(dim(), L.turn_axis[r], L.turn_sign[r]);
        add({Arc{vec::axpy(row_end, tau, s), vec::scale(s, -1.0), dir, tau, std::numbers::pi}, PieceRole::turn});
      } else {
        const Point& o = L.end_cap_outward;
        add({Arc{vec::axpy(row_end, tau, o), vec::scale(o, -1.0), dir, tau, half_pi}, PieceRole::cap});
      }
    }
    curve_ = PiecewiseCurve(std::move(pieces_));
    pieces_.clear();
  }

  ZigzagLayout layout_;
  std::vector<Point> offsets_;
  std::vector<ConnectorInfo> connectors_;
  std::vector<CurvePiece> pieces_;
  PiecewiseCurve curve_;
};

// ---------------------------------------------------------------------------
// Reach estimate for piecewise curves

inline constexpr double kUnboundedReach = 1e12;

// Smallest circumradius over all consecutive vertex triples of the
// discretization, junction-spanning triples included.
inline double curve_min_osculating_radius(const PiecewiseCurve& curve, double max_step) {
  // Vertices closer than 1e-9 * max_step (degenerate pieces) are merged.
  std::vector<Point> pts;
  for (const auto& v : curve.discretize(max_step))
    if (pts.empty() || vec::norm(vec::sub(v.p, pts.back())) > 1e-9 * max_step) pts.push_back(v.p);
  double r = kUnboundedReach;
  for (std::size_t i = 0; i + 2 < pts.size(); ++i) r = std::min(r, vec::circumradius(pts[i], pts[i + 1], pts[i + 2]));
  return r;
}

// Lower estimate of the local reach of a discretized curve: the smallest
// circumradius of consecutive discretization triples inside a piece, then
// shrunk until, for every sampled vertex p and normal n, p is a nearest
// vertex (within arclength pi * r) of p + r n.
inline double curve_min_reach(const PiecewiseCurve& curve, double max_step, std::size_t stride = 1) {
  const auto verts = curve.discretize(max_step);
  double reach = kUnboundedReach;
  for (std::size_t i = 0; i + 2 < verts.size(); ++i) {
    if (verts[i].piece != verts[i + 2].piece || verts[i + 1].piece != verts[i].piece) continue;
    if (!curve.pieces()[verts[i].piece].is_arc()) continue;
    reach = std::min(reach, vec::circumradius(verts[i].p, verts[i + 1].p, verts[i + 2].p));
  }
  const double window = std::numbers::pi * reach;
  std::vector<double> svals(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) svals[i] = verts[i].s;

  auto consistent = [&](std::size_t i, const Point& n, double r, std::size_t lo, std::size_t hi) {
    const Point q = vec::axpy(verts[i].p, r, n);
    const double limit = r * (1.0 - 1e-9);
    for (std::size_t j = lo; j < hi; ++j)
      if (vec::norm(vec::sub(q, verts[j].p)) < limit) return false;
    return true;
  };

  double result = reach;
  for (std::size_t i = 0; i < verts.size(); i += std::max<std::size_t>(stride, 1)) {
    const auto& v = verts[i];
    const auto& pc = curve.pieces()[v.piece];
    const Point t = pc.tangent(v.s - curve.piece_offset(v.piece));
    std::vector<Point> normals;
    for (const auto& b : vec::normal_basis(t)) {
      normals.push_back(b);
      normals.push_back(vec::scale(b, -1.0));
    }
    if (const auto* a = std::get_if<Arc>(&pc.shape)) {
      const Point inward = vec::scale(vec::sub(a->center, v.p), 1.0 / a->radius);
      normals.push_back(inward);
      normals.push_back(vec::scale(inward, -1.0));
    }
    const auto lo = static_cast<std::size_t>(std::lower_bound(svals.begin(), svals.end(), v.s - window) - svals.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(svals.begin(), svals.end(), v.s + window) - svals.begin());
    for (const auto& n : normals) {
      if (consistent(i, n, result, lo, hi)) continue;
      double good = 0.0, bad = result;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (good + bad);
        (consistent(i, n, mid, lo, hi) ? good : bad) = mid;
      }
      result = good;
    }
  }
  return result;
}

inline double curve_min_reach(const ZigzagManifold& m, std::size_t stride = 4) {
  return curve_min_reach(m.curve(), m.params().tau_l / 200.0, stride);
}

// ---------------------------------------------------------------------------
// Samplers

struct SamplerSpec;

struct UniformCube {
  int d = 1;
};

// Uniform on the d-sphere of the given radius in the first d + 1 coordinates.
// Not part of the lower-bound family; a reach-exact fixture.
struct UniformSphere {
  int d = 1;
  double radius = 1.0;
};

// Arclength-uniform on a native (d1 = 1) zigzag curve. random_offsets draws
// fresh offsets uniformly from B(0, w) per sample call.
struct ZigzagCurve {
  ZigzagParams params;
  std::vector<Point> offsets;
  bool random_offsets = false;
};

struct ProductWithCube {
  std::shared_ptr<const SamplerSpec> base;
  int extra_dims = 1;
};

struct SamplerSpec {
  std::variant<UniformCube, UniformSphere, ZigzagCurve, ProductWithCube> kind;
  RegularityParams params;

  int ambient_dim() const { return params.m; }

  int intrinsic_dim() const {
    return std::visit(
        [](const auto& k) -> int {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformCube>) return k.d;
          else if constexpr (std::is_same_v<T, UniformSphere>) return k.d;
          else if constexpr (std::is_same_v<T, ZigzagCurve>) return k.params.d1;
          else return k.base->intrinsic_dim() + k.extra_dims;
        },
        kind);
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformCube>) return "uniform_cube(d=" + std::to_string(k.d) + ")";
          else if constexpr (std::is_same_v<T, UniformSphere>) return "uniform_sphere(d=" + std::to_string(k.d) + ")[fixture]";
          else if constexpr (std::is_same_v<T, ZigzagCurve>)
            return "zigzag(d2=" + std::to_string(k.params.d2) + ",n=" + std::to_string(k.params.n_blocks) + ")";
          else return k.base->name() + "x[-K_I,K_I]^" + std::to_string(k.extra_dims);
        },
        kind);
  }

  void validate() const {
    const int m = params.m;
    if (m < 1) throw InvalidArgument("sampler: m must be >= 1");
    if (!(params.K_I >= 1.0)) throw InvalidArgument("sampler: K_I must be >= 1");
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, UniformCube>) {
            if (k.d < 1 || k.d > m) throw InvalidArgument("uniform_cube: need 1 <= d <= m");
          } else if constexpr (std::is_same_v<T, UniformSphere>) {
            if (k.d < 1 || k.d + 1 > m) throw InvalidArgument("uniform_sphere: need d + 1 <= m");
            if (!(k.radius > 0.0) || k.radius > params.K_I) throw InvalidArgument("uniform_sphere: radius must be in (0, K_I]");
            if (k.radius < params.tau_g) throw InvalidArgument("uniform_sphere: radius below tau_g");
          } else if constexpr (std::is_same_v<T, ZigzagCurve>) {
            if (k.params.d1 != 1) throw InvalidArgument("zigzag sampler: native d1 must be 1");
            if (k.params.d2 > m) throw InvalidArgument("zigzag sampler: d2 exceeds m");
            if (k.params.K_I > params.K_I) throw InvalidArgument("zigzag sampler: K_I exceeds class K_I");
          } else {
            if (!k.base) throw InvalidArgument("product: missing base sampler");
            k.base->validate();
            if (k.extra_dims < 1) throw InvalidArgument("product: extra_dims must be >= 1");
            if (k.base->ambient_dim() + k.extra_dims != m) throw InvalidArgument("product: m must equal base m + extra_dims");
            if (k.base->params.K_I > params.K_I) throw InvalidArgument("product: base K_I exceeds K_I");
          }
        },
        kind);
  }
};

inline SamplerSpec uniform_cube_spec(int d, const RegularityParams& params) { return {UniformCube{d}, params}; }

inline SamplerSpec uniform_sphere_spec(int d, double radius, const RegularityParams& params) {
  return {UniformSphere{d, radius}, params};
}

// Spec of dimension d + extra_dims in R^(m + extra_dims); reach constants are
// inherited from the base.
inline SamplerSpec product_with_cube(const SamplerSpec& base, int extra_dims) {
  base.validate();
  if (extra_dims < 1) throw InvalidArgument("product_with_cube: extra_dims must be >= 1");
  SamplerSpec out{ProductWithCube{std::make_shared<const SamplerSpec>(base), extra_dims}, base.params};
  out.params.m = base.params.m + extra_dims;
  if (base.intrinsic_dim() + extra_dims > out.params.m) throw InvalidArgument("product_with_cube: dimension overflow");
  return out;
}

// Zigzag sampler of intrinsic dimension d1 in R^m; d1 > 1 is the native
// curve in R^(d2 - d1 + 1) times a (d1 - 1)-cube.
inline SamplerSpec zigzag_spec(int d1, int d2, std::size_t n_blocks, const RegularityParams& params,
                               std::vector<Point> offsets = {}, bool random_offsets = false) {
  if (d2 > params.m) throw InvalidArgument("zigzag_spec: d2 exceeds m");
  const auto native = ZigzagParams::make(1, d2 - d1 + 1, n_blocks, params.K_I, params.tau_l);
  RegularityParams base_params = params;
  base_params.m = params.m - (d1 - 1);
  SamplerSpec base{ZigzagCurve{native, std::move(offsets), random_offsets}, base_params};
  if (d1 == 1) return base;
  return product_with_cube(base, d1 - 1);
}

inline std::vector<Point> random_offsets(const ZigzagParams& p, Rng& rng) {
  const std::size_t k = static_cast<std::size_t>(p.codim());
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Point> out;
  for (std::size_t i = 0; i < p.n_blocks; ++i) {
    Point g(k);
    double len = 0.0;
    do {
      for (double& x : g) x = gauss(rng);
      len = vec::norm(g);
    } while (len == 0.0);
    const double radius = p.w * std::pow(unif(rng), 1.0 / static_cast<double>(k));
    out.push_back(vec::scale(g, radius / len));
  }
  return out;
}

namespace detail {

inline std::vector<double> sample_coords(const SamplerSpec& spec, std::size_t n, Seed seed) {
  const std::size_t m = static_cast<std::size_t>(spec.params.m);
  std::vector<double> out(n * m, 0.0);
  Rng rng = make_rng(seed);
  const double K = spec.params.K_I;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformCube>) {
          std::uniform_real_distribution<double> u(-K, K);
          for (std::size_t i = 0; i < n; ++i)
            for (int j = 0; j < k.d; ++j) out[i * m + static_cast<std::size_t>(j)] = u(rng);
        } else if constexpr (std::is_same_v<T, UniformSphere>) {
          std::normal_distribution<double> g;
          const std::size_t D = static_cast<std::size_t>(k.d + 1);
          Point x(D);
          for (std::size_t i = 0; i < n; ++i) {
            double len = 0.0;
            do {
              for (double& v : x) v = g(rng);
              len = vec::norm(x);
            } while (len == 0.0);
            for (std::size_t j = 0; j < D; ++j) out[i * m + j] = std::clamp(k.radius * x[j] / len, -K, K);
          }
        } else if constexpr (std::is_same_v<T, ZigzagCurve>) {
          Rng offset_rng = make_rng(derive(seed, 0xC0FFEE));
          auto offsets = k.random_offsets ? random_offsets(k.params, offset_rng) : k.offsets;
          const auto M = ZigzagManifold::build(k.params, std::move(offsets));
          std::uniform_real_distribution<double> u(0.0, M.curve().length());
          for (std::size_t i = 0; i < n; ++i) {
            const Point p = M.curve().point_at(u(rng));
            for (std::size_t j = 0; j < p.size(); ++j) out[i * m + j] = std::clamp(p[j], -K, K);
          }
        } else {
          const std::size_t mb = static_cast<std::size_t>(k.base->params.m);
          const auto base = sample_coords(*k.base, n, derive(seed, 1));
          Rng cube_rng = make_rng(derive(seed, 2));
          std::uniform_real_distribution<double> u(-K, K);
          for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(base.begin() + static_cast<std::ptrdiff_t>(i * mb), mb, out.begin() + static_cast<std::ptrdiff_t>(i * m));
            for (std::size_t j = mb; j < m; ++j) out[i * m + j] = u(cube_rng);
          }
        }
      },
      spec.kind);
  return out;
}

}  // namespace detail

// n i.i.d. draws from the uniform distribution on the sampler's support.
inline PointCloud sample(const SamplerSpec& spec, std::size_t n, Seed seed) {
  spec.validate();
  if (n < 1) throw InvalidArgument("sample: n must be >= 1");
  CloudMeta meta{spec.name(), seed, spec.intrinsic_dim(), spec.params.K_I};
  return PointCloud(static_cast<std::size_t>(spec.params.m), detail::sample_coords(spec, n, seed), std::move(meta));
}

}  // namespace tspdim
