#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "aglab/core.hpp"
#include "aglab/quadrature.hpp"

namespace aglab {

// Defaults, overridable through DomainConfig-style callers.
constexpr double kTolGeom = 1e-9;
constexpr double kTolCenter = 1e-5;

struct BoundarySample {
  Vec2 point;
  Vec2 inward_normal;
  double curvature = 0.0;
  double arclength = 0.0;
};

struct BoundaryFeature {
  Vec2 foot;           // nearest point on the boundary
  Vec2 outward;        // outward unit normal at the foot
  double curvature;    // boundary curvature at the foot
  double dist;         // |x - foot|
  bool corner;         // foot is a zero-radius vertex (rho = 0)
};

namespace detail {

inline Vec2 closest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double t = clamp((p - a).dot(ab) / ab.norm2(), 0.0, 1.0);
  return a + t * ab;
}

inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

// CCW angular distance from angle a to angle b, in [0, 2*pi)
inline double ccw_span(double a, double b) {
  double d = b - a;
  while (d < 0.0) d += 2.0 * kPi;
  while (d >= 2.0 * kPi) d -= 2.0 * kPi;
  return d;
}

}  // namespace detail

// Closed convex planar region. Four user-facing families backed by two cores:
// a convex polygon (1, 2 or >=3 vertices) thickened by an offset radius, or an
// ellipse with an optional offset. All boundary queries are closed-form except
// the ellipse foot point, which is a bracketed Newton solve.
class ConvexDomain {
 public:
  enum class Kind { Disk, Ellipse, RoundedPolygon, Stadium };

  static ConvexDomain disk(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
    ConvexDomain d;
    d.kind_ = Kind::Disk;
    d.verts_ = {center};
    d.rho_ = radius;
    d.init_poly();
    return d;
  }

  static ConvexDomain ellipse(Vec2 center, double a, double b, double rotation, double offset = 0.0) {
    if (!(a >= b) || !(b > 0.0)) throw ValidationError("ellipse needs a >= b > 0");
    if (offset < 0.0) throw ValidationError("ellipse offset must be >= 0");
    ConvexDomain d;
    d.kind_ = Kind::Ellipse;
    d.ecenter_ = center;
    d.ea_ = a;
    d.eb_ = b;
    d.erot_ = rotation;
    d.rho_ = offset;
    d.init_ellipse();
    return d;
  }

  static ConvexDomain rounded_polygon(std::vector<Vec2> vertices, double rounding) {
    if (rounding < 0.0) throw ValidationError("rounding radius must be >= 0");
    if (vertices.size() >= 2 && (vertices.front() - vertices.back()).norm() < 1e-14) vertices.pop_back();
    if (vertices.size() < 3) throw ValidationError("rounded polygon needs >= 3 vertices");
    double signed_area = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      Vec2 p = vertices[i], q = vertices[(i + 1) % vertices.size()];
      signed_area += p.cross(q);
    }
    if (signed_area < 0.0) std::reverse(vertices.begin(), vertices.end());
    const std::size_t m = vertices.size();
    double scale2 = 0.0;
    for (auto& v : vertices) scale2 = std::max(scale2, v.norm2());
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 a = vertices[i], b = vertices[(i + 1) % m], c = vertices[(i + 2) % m];
      if ((b - a).cross(c - b) <= 1e-12 * (scale2 + 1.0))
        throw ValidationError("polygon vertices must be in strictly convex position");
    }
    ConvexDomain d;
    d.kind_ = Kind::RoundedPolygon;
    d.verts_ = std::move(vertices);
    d.rho_ = rounding;
    d.init_poly();
    return d;
  }

  static ConvexDomain stadium(Vec2 p0, Vec2 p1, double radius) {
    if (!(radius > 0.0)) throw ValidationError("stadium radius must be positive");
    if ((p1 - p0).norm() < 1e-14) throw ValidationError("stadium endpoints coincide");
    ConvexDomain d;
    d.kind_ = Kind::Stadium;
    d.verts_ = {p0, p1};
    d.rho_ = radius;
    d.init_poly();
    return d;
  }

  Kind kind() const { return kind_; }
  double offset_radius() const { return rho_; }
  const std::vector<Vec2>& core_vertices() const { return verts_; }

  // ---- scalar geometry -----------------------------------------------------

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  double diameter() const { return diameter_; }
  Vec2 centroid() const { return centroid_; }

  std::pair<Vec2, Vec2> bbox() const { return {bbox_lo_, bbox_hi_}; }

  // maximum boundary curvature and a point attaining it; infinite at rho=0 corners
  std::pair<double, Vec2> max_curvature() const {
    if (is_ellipse()) {
      double kc = ea_ / (eb_ * eb_);
      double k = kc / (1.0 + rho_ * kc);
      return {k, unframe({ea_ + rho_, 0.0})};
    }
    if (verts_.size() >= 3 && rho_ == 0.0)
      return {std::numeric_limits<double>::infinity(), verts_[0]};
    Vec2 p = boundary_point(arc_start_length_);  // a point on the first arc
    return {1.0 / rho_, p};
  }

  // ---- point queries ---------------------------------------------------------

  bool contains(Vec2 x) const { return core_distance(x) <= rho_ + 0.0; }

  BoundaryFeature nearest_feature(Vec2 x) const {
    return is_ellipse() ? nearest_feature_ellipse(x) : nearest_feature_poly(x);
  }

  // > 0 inside, < 0 outside, 0 on the boundary; 1-Lipschitz
  double signed_distance(Vec2 x) const {
    BoundaryFeature f = nearest_feature(x);
    return contains(x) ? f.dist : -f.dist;
  }

  Vec2 metric_projection(Vec2 x) const { return nearest_feature(x).foot; }

  Vec2 inward_normal(Vec2 p) const {
    BoundaryFeature f = require_on_boundary(p);
    if (f.corner) throw ValidationError("normal undefined at corner");
    return -f.outward;
  }

  double curvature(Vec2 p) const {
    BoundaryFeature f = require_on_boundary(p);
    if (f.corner) throw ValidationError("curvature undefined at corner");
    return f.curvature;
  }

  // ---- transforms ------------------------------------------------------------

  ConvexDomain enlarge(double r) const {
    if (r < 0.0) throw ValidationError("enlarge needs r >= 0");
    if (is_ellipse()) return ellipse(ecenter_, ea_, eb_, erot_, rho_ + r);
    ConvexDomain d = *this;
    d.rho_ += r;
    d.init_poly();
    return d;
  }

  ConvexDomain translate(Vec2 t) const {
    ConvexDomain d = *this;
    if (d.is_ellipse()) {
      d.ecenter_ += t;
      d.init_ellipse();
    } else {
      for (auto& v : d.verts_) v += t;
      d.init_poly();
    }
    return d;
  }

  // similarity copy with centroid 0 and diameter 2
  ConvexDomain normalize() const {
    const Vec2 c = centroid();
    const double s = 2.0 / diameter();
    ConvexDomain d = *this;
    if (d.is_ellipse()) {
      d.ecenter_ = (ecenter_ - c) * s;
      d.ea_ = ea_ * s;
      d.eb_ = eb_ * s;
      d.rho_ = rho_ * s;
      d.init_ellipse();
    } else {
      for (auto& v : d.verts_) v = (v - c) * s;
      d.rho_ = rho_ * s;
      d.init_poly();
    }
    return d;
  }

  // ---- boundary parametrization ---------------------------------------------

  BoundarySample boundary_sample_at(double s) const;
  Vec2 boundary_point(double s) const { return boundary_sample_at(s).point; }

  std::vector<BoundarySample> boundary_samples(int n) const {
    if (n < 4) throw ValidationError("need at least 4 boundary samples");
    std::vector<BoundarySample> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(boundary_sample_at(perimeter_ * k / n));
    return out;
  }

  // Intersection of the full line {origin + t*dir} with the domain, as a
  // parameter interval. Empty optional when the line misses.
  std::optional<std::pair<double, double>> line_interval(Vec2 origin, Vec2 dir) const;

  // ---- serialization ----------------------------------------------------------

  nlohmann::json to_json() const;
  static ConvexDomain from_json(const nlohmann::json& j);

  bool is_ellipse() const { return kind_ == Kind::Ellipse; }

 private:
  ConvexDomain() = default;

  BoundaryFeature require_on_boundary(Vec2 p) const {
    BoundaryFeature f = nearest_feature(p);
    if (f.dist > 1e-6 * (1.0 + diameter_))
      throw ValidationError("point is not on the domain boundary");
    return f;
  }

  // distance from x to the (un-thickened) core set
  double core_distance(Vec2 x) const {
    if (is_ellipse()) {
      Vec2 z = frame(x);
      if (sqr(z.x / ea_) + sqr(z.y / eb_) <= 1.0) return 0.0;
      double t = project_core_t(z);
      return (z - core_point(t)).norm();
    }
    const std::size_t m = verts_.size();
    if (m == 1) return (x - verts_[0]).norm();
    if (m == 2) return (x - detail::closest_on_segment(x, verts_[0], verts_[1])).norm();
    bool inside = true;
    for (std::size_t i = 0; i < m; ++i) {
      if ((x - verts_[i]).cross(verts_[(i + 1) % m] - verts_[i]) > 0.0) {
        inside = false;
        break;
      }
    }
    if (inside) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      best = std::min(best, (x - detail::closest_on_segment(x, verts_[i], verts_[(i + 1) % m])).norm());
    return best;
  }

  // ---- polygon core ----------------------------------------------------------

  struct Edge {
    Vec2 a, b;     // core endpoints
    Vec2 dir;      // unit direction a->b
    Vec2 n;        // outward unit normal
    double len;
  };
  struct Corner {
    Vec2 v;
    double ang0;   // start angle of the outward normal cone
    double span;   // CCW span
  };

  void init_poly();
  BoundaryFeature nearest_feature_poly(Vec2 x) const;

  // ---- ellipse core ----------------------------------------------------------

  Vec2 frame(Vec2 x) const { return rotate(x - ecenter_, -erot_); }
  Vec2 unframe(Vec2 z) const { return rotate(z, erot_) + ecenter_; }
  Vec2 core_point(double t) const { return {ea_ * std::cos(t), eb_ * std::sin(t)}; }
  Vec2 core_outward(double t) const {
    return Vec2{eb_ * std::cos(t), ea_ * std::sin(t)}.normalized();
  }
  double core_curvature(double t) const {
    double s = std::sin(t), c = std::cos(t);
    return ea_ * eb_ / std::pow(ea_ * ea_ * s * s + eb_ * eb_ * c * c, 1.5);
  }
  Vec2 offset_point(double t) const { return core_point(t) + rho_ * core_outward(t); }

  double project_core_t(Vec2 z) const;        // foot parameter on the core ellipse
  double project_offset_t(Vec2 z) const;      // foot parameter on the offset curve
  void init_ellipse();
  BoundaryFeature nearest_feature_ellipse(Vec2 x) const;

  Kind kind_ = Kind::Disk;
  std::vector<Vec2> verts_;   // polygon-core vertices (1 disk, 2 stadium, >=3 polygon)
  double rho_ = 0.0;          // offset radius (disk/stadium radius, rounding)
  Vec2 ecenter_;
  double ea_ = 1.0, eb_ = 1.0, erot_ = 0.0;

  std::vector<Edge> edges_;
  std::vector<Corner> corners_;
  double area_ = 0.0, perimeter_ = 0.0, diameter_ = 0.0;
  Vec2 centroid_, bbox_lo_, bbox_hi_;
  double arc_start_length_ = 0.0;  // arclength where the first arc begins

  // feature walk for arclength parametrization: (length, kind, index)
  struct Piece {
    double len;
    bool is_arc;
    std::size_t idx;
  };
  std::vector<Piece> pieces_;

  // ellipse arclength table over t in [0, 2*pi]
  std::vector<double> elt_t_, elt_s_;
};

// ---------------------------------------------------------------------------

inline void ConvexDomain::init_poly() {
  const std::size_t m = verts_.size();
  edges_.clear();
  corners_.clear();
  pieces_.clear();
  if (m >= 2 && rho_ == 0.0 && m < 3) throw ValidationError("degenerate core needs positive radius");

  if (m == 1) {
    corners_.push_back({verts_[0], 0.0, 2.0 * kPi});
  } else {
    const std::size_t ne = (m == 2) ? 2 : m;  // a segment core walks both sides
    for (std::size_t i = 0; i < ne; ++i) {
      Vec2 a = verts_[i % m], b = verts_[(i + 1) % m];
      Edge e;
      e.a = a;
      e.b = b;
      e.len = (b - a).norm();
      e.dir = (b - a) / e.len;
      e.n = {e.dir.y, -e.dir.x};
      edges_.push_back(e);
    }
    for (std::size_t i = 0; i < ne; ++i) {
      const Edge& prev = edges_[i];
      const Edge& next = edges_[(i + 1) % ne];
      Corner c;
      c.v = prev.b;
      c.ang0 = detail::angle_of(prev.n);
      c.span = detail::ccw_span(c.ang0, detail::angle_of(next.n));
      corners_.push_back(c);
    }
  }

  // closed-form measures (Steiner decomposition)
  double core_area = 0.0, core_per = 0.0;
  Vec2 core_cm{0.0, 0.0};
  if (m >= 3) {
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 p = verts_[i], q = verts_[(i + 1) % m];
      double w = p.cross(q);
      core_area += 0.5 * w;
      core_cm += (p + q) * (w / 6.0);
    }
    core_cm = core_cm / core_area;
  }
  for (const Edge& e : edges_) core_per += e.len;

  area_ = core_area + rho_ * core_per + kPi * rho_ * rho_;
  perimeter_ = core_per + 2.0 * kPi * rho_;

  Vec2 weighted{0.0, 0.0};
  if (m >= 3) weighted += core_cm * core_area;
  for (const Edge& e : edges_) {
    double a = rho_ * e.len;
    Vec2 cm = (e.a + e.b) * 0.5 + e.n * (0.5 * rho_);
    weighted += cm * a;
  }
  for (const Corner& c : corners_) {
    double a = 0.5 * rho_ * rho_ * c.span;
    if (a <= 0.0) continue;
    double half = 0.5 * c.span;
    Vec2 bis{std::cos(c.ang0 + half), std::sin(c.ang0 + half)};
    double rr = (c.span > 0.0) ? (4.0 * rho_ * std::sin(half)) / (3.0 * c.span) : 0.0;
    weighted += (c.v + bis * rr) * a;
  }
  centroid_ = (area_ > 0.0) ? weighted / area_ : verts_[0];

  double dmax = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) dmax = std::max(dmax, (verts_[i] - verts_[j]).norm());
  diameter_ = dmax + 2.0 * rho_;

  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{-lo.x, -lo.y};
  for (const Vec2& v : verts_) {
    lo.x = std::min(lo.x, v.x - rho_);
    lo.y = std::min(lo.y, v.y - rho_);
    hi.x = std::max(hi.x, v.x + rho_);
    hi.y = std::max(hi.y, v.y + rho_);
  }
  bbox_lo_ = lo;
  bbox_hi_ = hi;

  // arclength walk: edge i, then the arc at its end corner
  if (m == 1) {
    arc_start_length_ = 0.0;
    pieces_.push_back({2.0 * kPi * rho_, true, 0});
  } else {
    double acc = 0.0;
    bool saw_arc = false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      pieces_.push_back({edges_[i].len, false, i});
      acc += edges_[i].len;
      double arc_len = rho_ * corners_[i].span;
      if (!saw_arc && arc_len > 0.0) {
        arc_start_length_ = acc;
        saw_arc = true;
      }
      pieces_.push_back({arc_len, true, i});
      acc += arc_len;
    }
  }
}

inline BoundaryFeature ConvexDomain::nearest_feature_poly(Vec2 x) const {
  BoundaryFeature best;
  best.dist = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_) {
    Vec2 A = e.a + e.n * rho_, B = e.b + e.n * rho_;
    Vec2 foot = detail::closest_on_segment(x, A, B);
    double d = (x - foot).norm();
    if (d < best.dist) best = {foot, e.n, 0.0, d, false};
  }
  for (const Corner& c : corners_) {
    Vec2 r = x - c.v;
    double rn = r.norm();
    Vec2 dir = (rn > 0.0) ? r / rn : Vec2{std::cos(c.ang0 + 0.5 * c.span), std::sin(c.ang0 + 0.5 * c.span)};
    double rel = detail::ccw_span(c.ang0, detail::angle_of(dir));
    if (rel <= c.span || corners_.size() == 1) {
      double d = std::abs(rn - rho_);
      // at rho = 0 a tie against an adjacent edge means the query point sits
      // on the corner itself, which must surface as a corner
      const bool wins = (rho_ == 0.0) ? d <= best.dist + 1e-13 * (1.0 + best.dist) : d < best.dist;
      if (wins) {
        BoundaryFeature f;
        f.foot = c.v + dir * rho_;
        f.outward = dir;
        f.corner = (rho_ == 0.0);
        f.curvature = (rho_ > 0.0) ? 1.0 / rho_ : std::numeric_limits<double>::infinity();
        f.dist = d;
        best = f;
      }
    }
  }
  return best;
}

// Bracketed Newton for the foot parameter on the core ellipse, folded into the
// first quadrant; stationarity residual driven below 1e-12 * scale^2.
inline double ConvexDomain::project_core_t(Vec2 z) const {
  const double sx = (z.x >= 0.0) ? 1.0 : -1.0;
  const double sy = (z.y >= 0.0) ? 1.0 : -1.0;
  const double px = std::abs(z.x), py = std::abs(z.y);
  const double a = ea_, b = eb_;
  double t;
  if (py < 1e-15 * (a + px)) {
    // on the major axis: interior root exists below the evolute cusp
    double cusp = (a * a - b * b) / a;
    t = (a == b || px >= cusp) ? 0.0 : std::acos(a * px / (a * a - b * b));
  } else if (px < 1e-15 * (b + py)) {
    t = 0.5 * kPi;
  } else {
    double lo = 0.0, hi = 0.5 * kPi;
    t = std::atan2(a * py, b * px);  // standard starting guess
    const double scale2 = sqr(a + px + py);
    for (int it = 0; it < 80; ++it) {
      double st = std::sin(t), ct = std::cos(t);
      double g = (b * b - a * a) * st * ct + a * px * st - b * py * ct;
      if (g > 0.0)
        hi = t;
      else
        lo = t;
      if (std::abs(g) < 1e-12 * scale2) break;
      double dg = (b * b - a * a) * (ct * ct - st * st) + a * px * ct + b * py * st;
      double tn = t - g / dg;
      t = (dg != 0.0 && tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    }
  }
  double c = sx * std::cos(t), s = sy * std::sin(t);
  return std::atan2(s, c);
}

// Foot parameter on the offset curve (rho > 0): coarse scan + golden section.
inline double ConvexDomain::project_offset_t(Vec2 z) const {
  auto dist2 = [&](double t) { return (z - offset_point(t)).norm2(); };
  const int N = 256;
  double tbest = 0.0, dbest = dist2(0.0);
  for (int i = 1; i < N; ++i) {
    double t = 2.0 * kPi * i / N;
    double d = dist2(t);
    if (d < dbest) {
      dbest = d;
      tbest = t;
    }
  }
  double lo = tbest - 2.0 * kPi / N, hi = tbest + 2.0 * kPi / N;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = dist2(c), fd = dist2(d);
  for (int it = 0; it < 90; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = dist2(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = dist2(d);
    }
  }
  return 0.5 * (lo + hi);
}

inline void ConvexDomain::init_ellipse() {
  area_ = kPi * ea_ * eb_;
  diameter_ = 2.0 * (ea_ + rho_);
  centroid_ = ecenter_;

  // cumulative arclength table of the (offset) boundary
  const int N = 2048;
  elt_t_.resize(N + 1);
  elt_s_.resize(N + 1);
  elt_t_[0] = 0.0;
  elt_s_[0] = 0.0;
  auto speed = [&](double t) {
    double s = std::sin(t), c = std::cos(t);
    double core = std::sqrt(ea_ * ea_ * s * s + eb_ * eb_ * c * c);
    return core * (1.0 + rho_ * core_curvature(t));
  };
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    double t0 = 2.0 * kPi * i / N, t1 = 2.0 * kPi * (i + 1) / N;
    acc += gauss_integrate(speed, t0, t1, 8);
    elt_t_[i + 1] = t1;
    elt_s_[i + 1] = acc;
  }
  double core_per = 0.0;
  {
    auto core_speed = [&](double t) {
      double s = std::sin(t), c = std::cos(t);
      return std::sqrt(ea_ * ea_ * s * s + eb_ * eb_ * c * c);
    };
    for (int i = 0; i < N; ++i)
      core_per += gauss_integrate(core_speed, 2.0 * kPi * i / N, 2.0 * kPi * (i + 1) / N, 8);
  }
  perimeter_ = acc;
  area_ = kPi * ea_ * eb_ + rho_ * core_per + kPi * rho_ * rho_;

  double ex = std::sqrt(sqr(ea_ * std::cos(erot_)) + sqr(eb_ * std::sin(erot_)));
  double ey = std::sqrt(sqr(ea_ * std::sin(erot_)) + sqr(eb_ * std::cos(erot_)));
  bbox_lo_ = ecenter_ - Vec2{ex + rho_, ey + rho_};
  bbox_hi_ = ecenter_ + Vec2{ex + rho_, ey + rho_};
}

inline BoundaryFeature ConvexDomain::nearest_feature_ellipse(Vec2 x) const {
  Vec2 z = frame(x);
  double t = (rho_ == 0.0) ? project_core_t(z) : project_offset_t(z);
  Vec2 foot_f = offset_point(t);
  Vec2 n_f = core_outward(t);
  double kc = core_curvature(t);
  BoundaryFeature f;
  f.foot = unframe(foot_f);
  f.outward = rotate(n_f, erot_);
  f.curvature = kc / (1.0 + rho_ * kc);
  f.dist = (x - f.foot).norm();
  f.corner = false;
  return f;
}

inline BoundarySample ConvexDomain::boundary_sample_at(double s) const {
  s = std::fmod(s, perimeter_);
  if (s < 0.0) s += perimeter_;
  BoundarySample out;
  out.arclength = s;
  if (is_ellipse()) {
    auto it = std::upper_bound(elt_s_.begin(), elt_s_.end(), s);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - elt_s_.begin()), elt_s_.size() - 1);
    double t0 = elt_t_[i - 1], s0 = elt_s_[i - 1], t1 = elt_t_[i], s1 = elt_s_[i];
    double t = t0 + (t1 - t0) * (s - s0) / std::max(s1 - s0, 1e-300);
    auto speed = [&](double tt) {
      double sn = std::sin(tt), cs = std::cos(tt);
      double core = std::sqrt(ea_ * ea_ * sn * sn + eb_ * eb_ * cs * cs);
      return core * (1.0 + rho_ * core_curvature(tt));
    };
    for (int it2 = 0; it2 < 3; ++it2) {
      double resid = (gauss_integrate(speed, t0, t, 8) + s0) - s;
      t -= resid / speed(t);
      t = clamp(t, t0, t1 + (t1 - t0));
    }
    Vec2 n_f = core_outward(t);
    double kc = core_curvature(t);
    out.point = unframe(offset_point(t));
    out.inward_normal = rotate(-n_f, erot_);
    out.curvature = kc / (1.0 + rho_ * kc);
    return out;
  }
  double rem = s;
  for (const Piece& pc : pieces_) {
    if (rem > pc.len) {
      rem -= pc.len;
      continue;
    }
    if (!pc.is_arc) {
      const Edge& e = edges_[pc.idx];
      out.point = e.a + e.n * rho_ + e.dir * rem;
      out.inward_normal = -e.n;
      out.curvature = 0.0;
    } else {
      const Corner& c = corners_[pc.idx];
      double ang = c.ang0 + rem / rho_;
      Vec2 dir{std::cos(ang), std::sin(ang)};
      out.point = c.v + dir * rho_;
      out.inward_normal = -dir;
      out.curvature = 1.0 / rho_;
    }
    return out;
  }
  // fell off the end by roundoff: wrap to the start
  return boundary_sample_at(0.0);
}

inline std::optional<std::pair<double, double>> ConvexDomain::line_interval(Vec2 o, Vec2 d) const {
  std::vector<double> hits;
  const double dn = d.norm();
  if (dn == 0.0) throw ValidationError("line direction must be nonzero");
  Vec2 u = d / dn;

  if (is_ellipse() && rho_ == 0.0) {
    Vec2 zo = frame(o), zd = rotate(u, -erot_);
    double A = sqr(zd.x / ea_) + sqr(zd.y / eb_);
    double B = 2.0 * (zo.x * zd.x / sqr(ea_) + zo.y * zd.y / sqr(eb_));
    double C = sqr(zo.x / ea_) + sqr(zo.y / eb_) - 1.0;
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    double sd = std::sqrt(disc);
    hits.push_back((-B - sd) / (2.0 * A));
    hits.push_back((-B + sd) / (2.0 * A));
  } else if (is_ellipse()) {
    // offset ellipse: bisection against the convex distance-to-core function
    auto g = [&](double t) { return core_distance(o + u * t) - rho_; };
    double T = (o - ecenter_).norm() + ea_ + rho_ + 1.0;
    double lo = -T, hi = T;
    // ternary search for the minimum of the convex g
    for (int it = 0; it < 200; ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (g(m1) < g(m2))
        hi = m2;
      else
        lo = m1;
    }
    double tm = 0.5 * (lo + hi);
    if (g(tm) > 0.0) return std::nullopt;
    auto bisect = [&](double a, double b) {
      // g(a), g(b) straddle zero
      for (int it = 0; it < 100; ++it) {
        double m = 0.5 * (a + b);
        if (g(m) > 0.0)
          a = m;
        else
          b = m;
      }
      return 0.5 * (a + b);
    };
    hits.push_back(bisect(-T, tm));
    double right = bisect(T, tm);
    hits.push_back(right);
  } else {
    for (const Edge& e : edges_) {
      Vec2 A = e.a + e.n * rho_;
      double denom = u.dot(e.n);
      if (std::abs(denom) < 1e-15) continue;
      double t = (A - o).dot(e.n) / denom;
      double along = (o + u * t - A).dot(e.dir);
      if (along >= -1e-12 * (1.0 + e.len) && along <= e.len + 1e-12 * (1.0 + e.len)) hits.push_back(t);
    }
    if (rho_ > 0.0) {
      for (const Corner& c : corners_) {
        Vec2 w = o - c.v;
        double B = 2.0 * w.dot(u), C = w.norm2() - rho_ * rho_;
        double disc = B * B - 4.0 * C;
        if (disc < 0.0) continue;
        double sd = std::sqrt(disc);
        for (double t : {(-B - sd) / 2.0, (-B + sd) / 2.0}) {
          Vec2 dir = (o + u * t - c.v) / rho_;
          double rel = detail::ccw_span(c.ang0, detail::angle_of(dir));
          if (rel <= c.span + 1e-9 || corners_.size() == 1) hits.push_back(t);
        }
      }
    }
    if (hits.empty()) return std::nullopt;
  }
  if (hits.empty()) return std::nullopt;
  auto [mn, mx] = std::minmax_element(hits.begin(), hits.end());
  // hits are in unit-direction parameters; rescale to the caller's dir
  return std::make_pair(*mn / dn, *mx / dn);
}

inline nlohmann::json ConvexDomain::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::Disk:
      j["shape"] = "disk";
      j["center"] = {verts_[0].x, verts_[0].y};
      j["radius"] = rho_;
      break;
    case Kind::Ellipse:
      j["shape"] = "ellipse";
      j["center"] = {ecenter_.x, ecenter_.y};
      j["a"] = ea_;
      j["b"] = eb_;
      j["rotation"] = erot_;
      if (rho_ > 0.0) j["offset"] = rho_;
      break;
    case Kind::RoundedPolygon: {
      j["shape"] = "rounded-polygon";
      nlohmann::json vv = nlohmann::json::array();
      for (const Vec2& v : verts_) vv.push_back({v.x, v.y});
      j["vertices"] = vv;
      j["rounding"] = rho_;
      break;
    }
    case Kind::Stadium:
      j["shape"] = "stadium";
      j["p0"] = {verts_[0].x, verts_[0].y};
      j["p1"] = {verts_[1].x, verts_[1].y};
      j["radius"] = rho_;
      break;
  }
  return j;
}

inline ConvexDomain ConvexDomain::from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) { return Vec2{a.at(0).get<double>(), a.at(1).get<double>()}; };
  const std::string shape = j.at("shape").get<std::string>();
  Vec2 center{0.0, 0.0};
  if (j.contains("center")) center = vec(j["center"]);
  if (shape == "disk") return disk(center, j.at("radius").get<double>());
  if (shape == "ellipse")
    return ellipse(center, j.at("a").get<double>(), j.at("b").get<double>(),
                   j.value("rotation", 0.0), j.value("offset", 0.0));
  if (shape == "rounded-polygon") {
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vec(v));
    return rounded_polygon(std::move(verts), j.at("rounding").get<double>());
  }
  if (shape == "stadium") return stadium(vec(j.at("p0")), vec(j.at("p1")), j.at("radius").get<double>());
  throw ValidationError("unknown shape: " + shape);
}

}  // namespace aglab
