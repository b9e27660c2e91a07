#pragma once

#include "aglab/energy.hpp"
#include "aglab/fields.hpp"
#include "aglab/mollify.hpp"
#include "aglab/ramp.hpp"
#include "aglab/symdiff.hpp"

namespace aglab {

struct CompetitorParams {
  double eps = 0.0;
  double beta = 0.0;
  int q = 32;  // mollifier quadrature order per axis

  CompetitorParams(double eps_, double beta_, int q_ = 32) : eps(eps_), beta(beta_), q(q_) {
    if (!(eps > 0.0)) throw ValidationError("competitor eps must be positive");
    if (!(beta > 0.0)) throw ValidationError("competitor beta must be positive");
    if (eps > std::sqrt(beta) / 4.0 + 1e-15)
      throw ValidationError("competitor needs eps <= sqrt(beta)/4");
    if (q < 16) throw ValidationError("competitor quadrature order must be >= 16");
  }

  double cap_offset() const { return 1.0 - 10.0 * std::pow(beta, 3.0 / 32.0); }
};

namespace detail {

inline void require_curvature_bound(const ConvexDomain& domain, double eps) {
  auto [kmax, where] = domain.max_curvature();
  if (!(kmax <= 1.0 / std::sqrt(eps))) {
    throw ValidationError("boundary curvature " + std::to_string(kmax) + " at (" + std::to_string(where.x) +
                          ", " + std::to_string(where.y) + ") exceeds eps^(-1/2)");
  }
}

}  // namespace detail

// Mollified distance field on the boundary band, with kernel width shrinking
// like the distance to the boundary. Materialized on nodes with d <= 2*eps so
// the finite-difference stencils stay inside defined values.
inline ScalarField boundary_layer_field(const ConvexDomain& domain, double eps, double h, int q = 32,
                                        int threads = 1) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  detail::require_curvature_bound(domain, eps);
  MaskPtr dm = rasterize(domain, h, threads);
  ScalarField psi = ScalarField::zeros(dm);
  std::fill(psi.valid.begin(), psi.valid.end(), 0);
  const WidthRamp w(eps);
  auto source = [&](Vec2 z) { return domain.signed_distance(z); };
  const auto& dofs = dm->dofs;
  parallel_for(dofs.size(), threads, [&](std::size_t a, std::size_t b) {
    for (std::size_t k = a; k < b; ++k) {
      const int n = dofs[k];
      const double d = dm->sdist[n];
      if (d > 2.0 * eps + h) continue;
      const Vec2 x = dm->spec.node(n);
      const double width = w.value(d);
      psi.v[n] = (width > 0.0) ? adaptive_mollify(source, x, width, q) : source(x);
      psi.valid[n] = 1;
    }
  });
  return psi;
}

// v(x) = min{ d(x,boundary), cap_offset + |x| } : the distance field capped by
// an upward cone through the ridge region. Domain must be normalized.
inline ScalarField cone_cap(const ScalarField& u, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  const double c0 = 1.0 - 10.0 * std::pow(beta, 3.0 / 32.0);
  ScalarField v = u;
  for (int k : u.dm->dofs) {
    const Vec2 x = u.dm->spec.node(k);
    v.v[k] = std::min(u.v[k], c0 + x.norm());
  }
  return v;
}

struct ContactSetDiagnostic {
  bool empty = true;
  std::size_t contact_count = 0;
  double expected_radius = 0.0;  // 5 beta^{3/32}
  double hausdorff_band = 0.0;   // max | |x| - expected_radius | over contact nodes
  double tube_area = 0.0;        // |N_{2 eps}(contact set)|
};

// Locates the discrete contact set {u = cone} by sign changes across grid
// edges and measures its tube.
inline ContactSetDiagnostic contact_set_diagnostic(const ScalarField& u, double beta, double eps) {
  if (!(beta > 0.0) || !(eps > 0.0)) throw ValidationError("beta and eps must be positive");
  const DomainMask& dm = *u.dm;
  const GridSpec& g = dm.spec;
  const double c0 = 1.0 - 10.0 * std::pow(beta, 3.0 / 32.0);
  ContactSetDiagnostic out;
  out.expected_radius = 5.0 * std::pow(beta, 3.0 / 32.0);

  auto fval = [&](int k) { return u.v[k] - (c0 + g.node(k).norm()); };
  std::vector<Vec2> contact;
  for (int k : dm.dofs) {
    if (!u.valid[k]) continue;
    const int i = k % g.nx, j = k / g.nx;
    const double fk = fval(k);
    bool hit = (fk == 0.0);
    const int di[2] = {1, 0}, dj[2] = {0, 1};
    for (int e = 0; e < 2 && !hit; ++e) {
      int ii = i + di[e], jj = j + dj[e];
      if (!g.in_bounds(ii, jj)) continue;
      int kk = g.idx(ii, jj);
      if (!dm.is_active(kk) || !u.valid[kk]) continue;
      if (fk * fval(kk) < 0.0) hit = true;
    }
    if (hit) contact.push_back(g.node(k));
  }
  out.contact_count = contact.size();
  out.empty = contact.empty();
  if (out.empty) return out;

  double band = 0.0;
  for (const Vec2& p : contact) band = std::max(band, std::abs(p.norm() - out.expected_radius));
  out.hausdorff_band = band;

  const double r2 = sqr(2.0 * eps);
  const double cell = sqr(g.h);
  std::vector<double> terms;
  for (int k : dm.dofs) {
    const Vec2 p = g.node(k);
    for (const Vec2& c : contact) {
      if ((p - c).norm2() <= r2) {
        terms.push_back(dm.weight[k] * cell);
        break;
      }
    }
  }
  out.tube_area = pairwise_sum(terms);
  return out;
}

// The full low-energy test function: cone-capped distance, adaptively
// mollified with width w(d(x)); constant width eps away from the boundary.
inline ScalarField build_competitor(const ConvexDomain& domain, const CompetitorParams& params, double h,
                                    int threads = 1) {
  detail::require_curvature_bound(domain, params.eps);
  if (domain.centroid().norm() > 1e-6 || std::abs(domain.diameter() - 2.0) > 1e-6)
    throw ValidationError("competitor requires a normalized domain (centroid 0, diameter 2)");
  {
    const double sd = disk_symmetric_difference(domain, {0.0, 0.0});
    if (sd > params.beta * (1.0 + 1e-6) + 1e-5)
      throw ValidationError("domain symmetric difference " + std::to_string(sd) + " exceeds beta");
  }
  MaskPtr dm = rasterize(domain, h, threads);
  const WidthRamp w(params.eps);
  // The cone cap is a local modification near the distance ridge and only
  // meaningful while its offset stays positive (beta below ~2e-11). For larger
  // beta the raw min would replace the whole field and invert the boundary
  // trace, so the cap is skipped and the competitor mollifies the distance.
  const double c0 = params.cap_offset();
  const bool cap_active = c0 > 0.0;
  auto source = [&](Vec2 z) {
    double d = domain.signed_distance(z);
    return cap_active ? std::min(d, c0 + z.norm()) : d;
  };

  ScalarField xi = ScalarField::zeros(dm);
  const auto& dofs = dm->dofs;
  const int q = params.q;
  parallel_for(dofs.size(), threads, [&](std::size_t a, std::size_t b) {
    for (std::size_t k = a; k < b; ++k) {
      const int n = dofs[k];
      const double d = dm->sdist[n];
      const Vec2 x = dm->spec.node(n);
      const double width = w.value(d);
      xi.v[n] = (width > 0.0) ? adaptive_mollify(source, x, width, q) : source(x);
    }
  });
  return xi;
}

// Discrete total variation of grad u over a region: sum of |hess u|_F h^2.
template <class RegionPred>
double tv_gradient(const ScalarField& u, const RegionPred& region) {
  const DomainMask& dm = *u.dm;
  const HessianField H = hessian(u);
  std::vector<std::uint8_t> valid(H.valid.size(), 0);
  for (int k : dm.dofs) valid[k] = H.valid[k] && region(dm.spec.node(k));
  return integrate_expr(dm, [&](int k) { return std::sqrt(H.frob2(k)); }, valid).value;
}

}  // namespace aglab
