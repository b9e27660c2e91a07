#pragma once

#include <memory>
#include <optional>

#include "aglab/core.hpp"
#include "aglab/domain.hpp"

namespace aglab {

enum class NodeClass : std::uint8_t { Exterior = 0, Cut = 1, Interior = 2 };

struct GridSpec {
  Vec2 origin;
  double h = 0.0;
  int nx = 0, ny = 0;

  int count() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  Vec2 node(int i, int j) const { return {origin.x + h * i, origin.y + h * j}; }
  Vec2 node(int n) const { return node(n % nx, n / nx); }

  bool operator==(const GridSpec& o) const {
    return nx == o.nx && ny == o.ny && h == o.h && origin.x == o.origin.x && origin.y == o.origin.y;
  }
};

// One-axis first-derivative stencils in CSR form. Second-order central at
// interior nodes, second-order one-sided at cut nodes, empty row when the
// stencil cannot be formed from interior/cut neighbors.
struct FdOp {
  std::vector<int> row_start;
  std::vector<int> col;
  std::vector<double> coef;

  void apply(const std::vector<double>& src, const std::vector<std::uint8_t>& src_valid,
             std::vector<double>& dst, std::vector<std::uint8_t>& dst_valid) const {
    const int n = static_cast<int>(row_start.size()) - 1;
    dst.assign(n, 0.0);
    dst_valid.assign(n, 0);
    for (int r = 0; r < n; ++r) {
      int lo = row_start[r], hi = row_start[r + 1];
      if (lo == hi) continue;
      double acc = 0.0;
      bool ok = true;
      for (int k = lo; k < hi; ++k) {
        if (!src_valid[col[k]]) {
          ok = false;
          break;
        }
        acc += coef[k] * src[col[k]];
      }
      if (ok) {
        dst[r] = acc;
        dst_valid[r] = 1;
      }
    }
  }

  // scatter-transpose: accumulates coef^T * sens into grad for rows marked active
  void apply_transpose(const std::vector<double>& sens, const std::vector<std::uint8_t>& active,
                       std::vector<double>& grad) const {
    const int n = static_cast<int>(row_start.size()) - 1;
    for (int r = 0; r < n; ++r) {
      if (!active[r]) continue;
      double s = sens[r];
      if (s == 0.0) continue;
      for (int k = row_start[r]; k < row_start[r + 1]; ++k) grad[col[k]] += coef[k] * s;
    }
  }
};

struct DomainMask {
  GridSpec spec;
  std::vector<std::uint8_t> cls;    // NodeClass per node
  std::vector<double> weight;      // cell fraction inside the domain, in [0,1]
  std::vector<double> sdist;       // signed distance per node
  std::vector<int> dofs;           // nodes with cls != Exterior, ascending
  std::size_t interior_count = 0;
  double domain_area = 0.0;
  FdOp dx, dy;

  bool is_active(int n) const { return cls[n] != static_cast<std::uint8_t>(NodeClass::Exterior); }
};

using MaskPtr = std::shared_ptr<const DomainMask>;

namespace detail {

inline void build_axis_op(const DomainMask& dm, int di, int dj, FdOp& op) {
  const GridSpec& g = dm.spec;
  const int n = g.count();
  const double h = g.h;
  op.row_start.assign(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> cfs;
  cols.reserve(3 * n);
  cfs.reserve(3 * n);
  auto active = [&](int i, int j) { return g.in_bounds(i, j) && dm.is_active(g.idx(i, j)); };
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const int r = g.idx(i, j);
      op.row_start[r] = static_cast<int>(cols.size());
      if (!dm.is_active(r)) continue;
      const bool has_m = active(i - di, j - dj);
      const bool has_p = active(i + di, j + dj);
      if (has_m && has_p) {
        cols.push_back(g.idx(i - di, j - dj));
        cfs.push_back(-0.5 / h);
        cols.push_back(g.idx(i + di, j + dj));
        cfs.push_back(0.5 / h);
      } else if (has_p && active(i + 2 * di, j + 2 * dj)) {
        cols.push_back(r);
        cfs.push_back(-1.5 / h);
        cols.push_back(g.idx(i + di, j + dj));
        cfs.push_back(2.0 / h);
        cols.push_back(g.idx(i + 2 * di, j + 2 * dj));
        cfs.push_back(-0.5 / h);
      } else if (has_m && active(i - 2 * di, j - 2 * dj)) {
        cols.push_back(r);
        cfs.push_back(1.5 / h);
        cols.push_back(g.idx(i - di, j - dj));
        cfs.push_back(-2.0 / h);
        cols.push_back(g.idx(i - 2 * di, j - 2 * dj));
        cfs.push_back(0.5 / h);
      }
      // else: no usable stencil; row stays empty and the node drops out of
      // derivative-dependent integrals (counted as excluded area)
    }
  }
  op.row_start[n] = static_cast<int>(cols.size());
  op.col = std::move(cols);
  op.coef = std::move(cfs);
}

}  // namespace detail

// Classify nodes against the domain and attach quadrature weights. Cut-cell
// weights come from 4x4 subcell sampling of the signed distance.
inline MaskPtr rasterize(const ConvexDomain& domain, double h, int threads = 1) {
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  if (h > domain.diameter() / 16.0) throw ValidationError("grid too coarse: need h <= diameter/16");
  auto dm = std::make_shared<DomainMask>();
  auto [lo, hi] = domain.bbox();
  GridSpec g;
  g.h = h;
  g.origin = {lo.x - 3.0 * h, lo.y - 3.0 * h};
  g.nx = static_cast<int>(std::ceil((hi.x - lo.x + 6.0 * h) / h)) + 1;
  g.ny = static_cast<int>(std::ceil((hi.y - lo.y + 6.0 * h) / h)) + 1;
  dm->spec = g;
  const int n = g.count();
  dm->cls.assign(n, 0);
  dm->weight.assign(n, 0.0);
  dm->sdist.assign(n, 0.0);
  dm->domain_area = domain.area();

  parallel_for(n, threads, [&](std::size_t a, std::size_t b) {
    for (std::size_t k = a; k < b; ++k) {
      const int i = static_cast<int>(k) % g.nx, j = static_cast<int>(k) / g.nx;
      const Vec2 p = g.node(i, j);
      const double d = domain.signed_distance(p);
      dm->sdist[k] = d;
      if (d >= h) {
        dm->cls[k] = static_cast<std::uint8_t>(NodeClass::Interior);
        dm->weight[k] = 1.0;
      } else if (d <= -h) {
        dm->cls[k] = static_cast<std::uint8_t>(NodeClass::Exterior);
      } else {
        dm->cls[k] = static_cast<std::uint8_t>(NodeClass::Cut);
        int inside = 0;
        for (int si = 0; si < 4; ++si)
          for (int sj = 0; sj < 4; ++sj) {
            Vec2 q{p.x + h * ((si + 0.5) / 4.0 - 0.5), p.y + h * ((sj + 0.5) / 4.0 - 0.5)};
            if (domain.signed_distance(q) > 0.0) ++inside;
          }
        dm->weight[k] = inside / 16.0;
      }
    }
  });

  for (int k = 0; k < n; ++k) {
    if (dm->is_active(k)) dm->dofs.push_back(k);
    if (dm->cls[k] == static_cast<std::uint8_t>(NodeClass::Interior)) ++dm->interior_count;
  }
  if (dm->interior_count < 256) throw ValidationError("grid too coarse: fewer than 256 interior nodes");

  detail::build_axis_op(*dm, 1, 0, dm->dx);
  detail::build_axis_op(*dm, 0, 1, dm->dy);
  return dm;
}

struct ScalarField {
  MaskPtr dm;
  std::vector<double> v;
  std::vector<std::uint8_t> valid;

  static ScalarField zeros(MaskPtr m) {
    ScalarField f;
    f.dm = std::move(m);
    f.v.assign(f.dm->spec.count(), 0.0);
    f.valid.assign(f.dm->spec.count(), 0);
    for (int k : f.dm->dofs) f.valid[k] = 1;
    return f;
  }

  template <class F>
  static ScalarField sample(MaskPtr m, const F& fn, int threads = 1) {
    ScalarField f = zeros(std::move(m));
    const auto& dofs = f.dm->dofs;
    parallel_for(dofs.size(), threads, [&](std::size_t a, std::size_t b) {
      for (std::size_t k = a; k < b; ++k) f.v[dofs[k]] = fn(f.dm->spec.node(dofs[k]));
    });
    return f;
  }
};

struct VectorField {
  MaskPtr dm;
  std::vector<double> vx, vy;
  std::vector<std::uint8_t> valid;

  static VectorField zeros(MaskPtr m) {
    VectorField f;
    f.dm = std::move(m);
    f.vx.assign(f.dm->spec.count(), 0.0);
    f.vy.assign(f.dm->spec.count(), 0.0);
    f.valid.assign(f.dm->spec.count(), 0);
    for (int k : f.dm->dofs) f.valid[k] = 1;
    return f;
  }
};

inline VectorField gradient(const ScalarField& f) {
  VectorField g;
  g.dm = f.dm;
  std::vector<std::uint8_t> vx_ok, vy_ok;
  f.dm->dx.apply(f.v, f.valid, g.vx, vx_ok);
  f.dm->dy.apply(f.v, f.valid, g.vy, vy_ok);
  g.valid.resize(vx_ok.size());
  for (std::size_t k = 0; k < vx_ok.size(); ++k) g.valid[k] = vx_ok[k] && vy_ok[k];
  return g;
}

struct HessianField {
  MaskPtr dm;
  std::vector<double> xx, xy, yy;
  std::vector<std::uint8_t> valid;

  double frob2(int k) const { return xx[k] * xx[k] + 2.0 * xy[k] * xy[k] + yy[k] * yy[k]; }
};

// Hessian as the symmetrized Jacobian of the discrete gradient; exact on
// quadratics at interior and one-sided cut stencils alike.
inline HessianField hessian(const ScalarField& f) {
  const auto& dm = *f.dm;
  std::vector<double> gx, gy, gxy, gyx;
  std::vector<std::uint8_t> ok_gx, ok_gy, a, b, c, d;
  dm.dx.apply(f.v, f.valid, gx, ok_gx);
  dm.dy.apply(f.v, f.valid, gy, ok_gy);
  HessianField H;
  H.dm = f.dm;
  dm.dx.apply(gx, ok_gx, H.xx, a);
  dm.dy.apply(gy, ok_gy, H.yy, b);
  dm.dy.apply(gx, ok_gx, gxy, c);
  dm.dx.apply(gy, ok_gy, gyx, d);
  const std::size_t n = gx.size();
  H.xy.assign(n, 0.0);
  H.valid.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    H.valid[k] = a[k] && b[k] && c[k] && d[k];
    if (H.valid[k]) H.xy[k] = 0.5 * (gxy[k] + gyx[k]);
  }
  return H;
}

struct IntegralResult {
  double value = 0.0;
  double excluded_area = 0.0;
  std::size_t excluded_count = 0;
};

// Sum g * weight * h^2 over active nodes in fixed dof order with pairwise
// reduction; bit-identical across runs and worker counts.
template <class F>
IntegralResult integrate_expr(const DomainMask& dm, const F& g, const std::vector<std::uint8_t>& valid) {
  const double cell = dm.spec.h * dm.spec.h;
  std::vector<double> terms;
  terms.reserve(dm.dofs.size());
  IntegralResult r;
  for (int k : dm.dofs) {
    if (!valid[k]) {
      r.excluded_area += dm.weight[k] * cell;
      ++r.excluded_count;
      continue;
    }
    const double val = g(k);
    if (std::isnan(val)) {
      const Vec2 p = dm.spec.node(k);
      throw NumericError("NaN integrand at node " + std::to_string(k) + " (" + std::to_string(p.x) + ", " +
                         std::to_string(p.y) + ")");
    }
    terms.push_back(val * dm.weight[k] * cell);
  }
  r.value = pairwise_sum(terms);
  return r;
}

inline double integrate(const ScalarField& f) { return integrate_expr(*f.dm, [&](int k) { return f.v[k]; }, f.valid).value; }

// Tensor-quadratic Lagrange interpolation from the nearest fully valid 3x3
// block; returns nullopt when no such block exists nearby.
inline std::optional<double> interpolate_biquadratic(const GridSpec& g, const std::vector<double>& v,
                                                     const std::vector<std::uint8_t>& valid, Vec2 q) {
  const int ic = static_cast<int>(std::lround((q.x - g.origin.x) / g.h));
  const int jc = static_cast<int>(std::lround((q.y - g.origin.y) / g.h));
  auto block_ok = [&](int bi, int bj) {
    if (bi - 1 < 0 || bi + 1 >= g.nx || bj - 1 < 0 || bj + 1 >= g.ny) return false;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (!valid[g.idx(bi + di, bj + dj)]) return false;
    return true;
  };
  int bi = ic, bj = jc;
  bool found = false;
  for (int ring = 0; ring <= 3 && !found; ++ring) {
    for (int dj = -ring; dj <= ring && !found; ++dj)
      for (int di = -ring; di <= ring && !found; ++di) {
        if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
        if (block_ok(ic + di, jc + dj)) {
          bi = ic + di;
          bj = jc + dj;
          found = true;
        }
      }
  }
  if (!found) return std::nullopt;
  const double tx = (q.x - (g.origin.x + g.h * bi)) / g.h;
  const double ty = (q.y - (g.origin.y + g.h * bj)) / g.h;
  auto L = [](double t, int k) {
    switch (k) {
      case 0: return 0.5 * t * (t - 1.0);
      case 1: return 1.0 - t * t;
      default: return 0.5 * t * (t + 1.0);
    }
  };
  double acc = 0.0;
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) acc += L(tx, di + 1) * L(ty, dj + 1) * v[g.idx(bi + di, bj + dj)];
  return acc;
}

struct TraceSample {
  double arclength = 0.0;
  Vec2 point;          // boundary point
  Vec2 inward_normal;
  Vec2 eval_point;     // offset inward by h
  double value = 0.0;  // scalar trace
  Vec2 grad;           // gradient trace (when requested)
  double grad_dot_normal = 0.0;
  bool ok = false;
};

// Samples the boundary uniformly in arclength and evaluates the field at
// points offset inward by one grid spacing.
inline std::vector<TraceSample> boundary_trace(const ScalarField& f, const ConvexDomain& domain, int n_samples) {
  if (n_samples < 64) throw ValidationError("boundary_trace needs n_samples >= 64");
  const GridSpec& g = f.dm->spec;
  std::vector<TraceSample> out;
  out.reserve(n_samples);
  for (const BoundarySample& bs : domain.boundary_samples(n_samples)) {
    TraceSample t;
    t.arclength = bs.arclength;
    t.point = bs.point;
    t.inward_normal = bs.inward_normal;
    t.eval_point = bs.point + bs.inward_normal * g.h;
    auto val = interpolate_biquadratic(g, f.v, f.valid, t.eval_point);
    if (val) {
      t.value = *val;
      t.ok = true;
    }
    out.push_back(t);
  }
  return out;
}

inline std::vector<TraceSample> boundary_trace_gradient(const VectorField& vf, const ConvexDomain& domain,
                                                        int n_samples) {
  if (n_samples < 64) throw ValidationError("boundary_trace needs n_samples >= 64");
  const GridSpec& g = vf.dm->spec;
  std::vector<TraceSample> out;
  out.reserve(n_samples);
  for (const BoundarySample& bs : domain.boundary_samples(n_samples)) {
    TraceSample t;
    t.arclength = bs.arclength;
    t.point = bs.point;
    t.inward_normal = bs.inward_normal;
    t.eval_point = bs.point + bs.inward_normal * g.h;
    auto gx = interpolate_biquadratic(g, vf.vx, vf.valid, t.eval_point);
    auto gy = interpolate_biquadratic(g, vf.vy, vf.valid, t.eval_point);
    if (gx && gy) {
      t.grad = {*gx, *gy};
      t.grad_dot_normal = t.grad.dot(bs.inward_normal);
      t.ok = true;
    }
    out.push_back(t);
  }
  return out;
}

// sqrt( int (f-g)^2 + int |grad f - grad g|^2 ) on a common grid
inline double w12_distance(const ScalarField& f, const ScalarField& g) {
  if (!(f.dm->spec == g.dm->spec)) throw ValidationError("w12_distance: fields live on different grids");
  const DomainMask& dm = *f.dm;
  std::vector<std::uint8_t> both(f.valid.size());
  for (std::size_t k = 0; k < both.size(); ++k) both[k] = f.valid[k] && g.valid[k];
  auto d0 = integrate_expr(dm, [&](int k) { return sqr(f.v[k] - g.v[k]); }, both);
  VectorField gf = gradient(f), gg = gradient(g);
  std::vector<std::uint8_t> gboth(f.valid.size());
  for (std::size_t k = 0; k < gboth.size(); ++k) gboth[k] = gf.valid[k] && gg.valid[k];
  auto d1 = integrate_expr(dm, [&](int k) { return sqr(gf.vx[k] - gg.vx[k]) + sqr(gf.vy[k] - gg.vy[k]); }, gboth);
  return std::sqrt(d0.value + d1.value);
}

}  // namespace aglab
