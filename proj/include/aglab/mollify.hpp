#pragma once

#include <map>
#include <mutex>

#include "aglab/core.hpp"
#include "aglab/quadrature.hpp"

namespace aglab {

// Standard bump kernel exp(-1/(1-|z|^2)) on the unit disk, normalized to unit
// mass. Normalization and second moment computed once by radial quadrature
// and stored to 12 digits (verified against the quadrature in the tests).
struct BumpKernel {
  static double unnormalized(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

  // 2*pi * int_0^1 exp(-1/(1-r^2)) r dr
  static constexpr double kMass = 0.466512393178316;
  static constexpr double kNorm = 1.0 / kMass;  // normalizing constant c_rho
  // int |z|^2 rho(z) dz for the normalized kernel
  static constexpr double kSecondMoment = 0.261311203420562;

  static double value(Vec2 z) { return kNorm * unnormalized(z.norm2()); }
};

// Fixed Gauss-radial by uniform-angular stencil on the unit disk with the
// bump as the weight, renormalized so the weights sum to one. The angular
// symmetry makes mollification of affine sources exact to roundoff, and the
// radial Gauss rule handles the kernel's flat decay at the support edge.
struct MollifyStencil {
  std::vector<Vec2> pts;       // unit-kernel coordinates, |pt| < 1
  std::vector<double> wts;     // positive, renormalized to sum 1

  static const MollifyStencil& get(int q) {
    if (q < 4) throw ValidationError("mollifier quadrature order must be >= 4");
    static std::map<int, MollifyStencil> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
    MollifyStencil st;
    const GaussRule rule = gauss_legendre(q);
    std::vector<double> raw;
    for (int i = 0; i < q; ++i) {
      const double r = 0.5 + 0.5 * rule.nodes[i];
      const double wr = 0.5 * rule.weights[i] * r * BumpKernel::unnormalized(r * r);
      if (wr <= 0.0) continue;
      for (int j = 0; j < q; ++j) {
        const double th = 2.0 * kPi * (j + 0.5) / q;
        st.pts.push_back({r * std::cos(th), r * std::sin(th)});
        raw.push_back(wr);
      }
    }
    double total = pairwise_sum(raw);
    st.wts.resize(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) st.wts[k] = raw[k] / total;
    auto [pos, ok] = cache.emplace(q, std::move(st));
    (void)ok;
    return pos->second;
  }
};

// g(x) = int source(x - z) rho_width(z) dz by the fixed stencil. Exact for
// affine sources regardless of the width; relative error <= 1e-8 at q=32 for
// smooth sources.
template <class F>
double adaptive_mollify(const F& source, Vec2 x, double width, int q) {
  if (!(width > 0.0)) throw ValidationError("mollification width must be positive");
  const MollifyStencil& st = MollifyStencil::get(q);
  double acc = 0.0;
  for (std::size_t k = 0; k < st.pts.size(); ++k)
    acc += st.wts[k] * source(Vec2{x.x - width * st.pts[k].x, x.y - width * st.pts[k].y});
  return acc;
}

}  // namespace aglab
