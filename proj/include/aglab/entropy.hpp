#pragma once

#include "aglab/fields.hpp"
#include "aglab/ramp.hpp"

namespace aglab {

// Entropy pair built from a direction theta and a smooth ramp. The theta
// dependence is realized by rotating coordinates so that theta maps to e1.
// Evaluation is restricted to B_64(0); fields produced in this project stay
// within |z| <= 4.
class EntropyPair {
 public:
  EntropyPair(Vec2 theta, SmoothRamp ramp) : theta_(theta.normalized()), ramp_(ramp) {}

  static EntropyPair for_beta(Vec2 theta, double beta) {
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    return EntropyPair(theta, SmoothRamp(std::pow(beta, 0.25)));
  }

  Vec2 theta() const { return theta_; }
  double delta() const { return ramp_.delta(); }
  const SmoothRamp& ramp() const { return ramp_; }

  // sector indicator: theta on the z.theta > 0 half plane, 0 elsewhere
  Vec2 sector(Vec2 z) const { return z.dot(theta_) > 0.0 ? theta_ : Vec2{0.0, 0.0}; }

  Vec2 phi(Vec2 z) const {
    Vec2 w = to_frame(z);
    const double p = ramp_.value(w.x);
    const double dp = ramp_.deriv1(w.x);
    return from_frame({p * w.x + w.y * w.y * dp, p * w.y - w.y * w.x * dp});
  }

  Vec2 psi(Vec2 z) const {
    Vec2 w = to_frame(z);
    return from_frame({-ramp_.deriv1(w.x), 0.5 * w.y * ramp_.deriv2(w.x)});
  }

 private:
  Vec2 to_frame(Vec2 z) const {
    if (z.norm2() > 64.0 * 64.0) throw ValidationError("entropy pair evaluated outside B_64(0)");
    return {z.dot(theta_), z.dot(theta_.perp())};
  }
  Vec2 from_frame(Vec2 w) const { return theta_ * w.x + theta_.perp() * w.y; }

  Vec2 theta_;
  SmoothRamp ramp_;
};

struct IdentityResidual {
  double residual_l1 = 0.0;  // int |div Phi(m) - Psi(m) . grad(1-|m|^2)|
  double rhs_check = 0.0;    // int |Psi(m) . grad(1-|m|^2)|
  double excluded_area = 0.0;
};

inline IdentityResidual identity_residual(
    const VectorField& m, const EntropyPair& pair,
    const std::function<bool(Vec2)>& region = [](Vec2) { return true; }) {
  const DomainMask& dm = *m.dm;
  const int n = dm.spec.count();
  std::vector<double> phix(n, 0.0), phiy(n, 0.0), smag(n, 0.0);
  for (int k : dm.dofs) {
    if (!m.valid[k]) continue;
    Vec2 mk{m.vx[k], m.vy[k]};
    Vec2 p = pair.phi(mk);
    phix[k] = p.x;
    phiy[k] = p.y;
    smag[k] = 1.0 - mk.norm2();
  }
  std::vector<double> dxx, dyy, sx, sy;
  std::vector<std::uint8_t> ok1, ok2, ok3, ok4;
  dm.dx.apply(phix, m.valid, dxx, ok1);
  dm.dy.apply(phiy, m.valid, dyy, ok2);
  dm.dx.apply(smag, m.valid, sx, ok3);
  dm.dy.apply(smag, m.valid, sy, ok4);
  std::vector<std::uint8_t> valid(n, 0);
  for (int k = 0; k < n; ++k)
    valid[k] = ok1[k] && ok2[k] && ok3[k] && ok4[k] && region(dm.spec.node(k));

  IdentityResidual out;
  auto rhs_at = [&](int k) {
    Vec2 ps = pair.psi({m.vx[k], m.vy[k]});
    return ps.x * sx[k] + ps.y * sy[k];
  };
  auto res = integrate_expr(dm, [&](int k) { return std::abs(dxx[k] + dyy[k] - rhs_at(k)); }, valid);
  auto rhs = integrate_expr(dm, [&](int k) { return std::abs(rhs_at(k)); }, valid);
  out.residual_l1 = res.value;
  out.rhs_check = rhs.value;
  out.excluded_area = res.excluded_area;
  return out;
}

struct CurlFluxBound {
  double lhs = 0.0;  // int |curl[R(Phi(m)) - R(Psi(m)) (1-|m|^2)]|
  double rhs = 0.0;  // C beta^{-1/2} int |m| |1-|m|^2| |grad m|
};

// Module constant for the right-hand side, frozen after calibration on the
// disk competitor sweep.
constexpr double kCurlFluxConstant = 8.0;

inline CurlFluxBound curl_flux_bound(const VectorField& m, const EntropyPair& pair, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (std::abs(pair.delta() - std::pow(beta, 0.25)) > 1e-9 * std::pow(beta, 0.25))
    throw ValidationError("entropy pair ramp width must equal beta^(1/4)");
  const DomainMask& dm = *m.dm;
  const int n = dm.spec.count();
  std::vector<double> gx_(n, 0.0), gy_(n, 0.0);
  for (int k : dm.dofs) {
    if (!m.valid[k]) continue;
    Vec2 mk{m.vx[k], m.vy[k]};
    Vec2 G = pair.phi(mk).perp() - pair.psi(mk).perp() * (1.0 - mk.norm2());
    gx_[k] = G.x;
    gy_[k] = G.y;
  }
  std::vector<double> dgy_dx, dgx_dy, mxx, mxy, myx, myy;
  std::vector<std::uint8_t> o1, o2, a1, a2, a3, a4;
  dm.dx.apply(gy_, m.valid, dgy_dx, o1);
  dm.dy.apply(gx_, m.valid, dgx_dy, o2);
  dm.dx.apply(m.vx, m.valid, mxx, a1);
  dm.dy.apply(m.vx, m.valid, mxy, a2);
  dm.dx.apply(m.vy, m.valid, myx, a3);
  dm.dy.apply(m.vy, m.valid, myy, a4);
  std::vector<std::uint8_t> valid(n, 0);
  for (int k = 0; k < n; ++k) valid[k] = o1[k] && o2[k] && a1[k] && a2[k] && a3[k] && a4[k];

  CurlFluxBound out;
  out.lhs = integrate_expr(dm, [&](int k) { return std::abs(dgy_dx[k] - dgx_dy[k]); }, valid).value;
  double flux = integrate_expr(dm,
                               [&](int k) {
                                 Vec2 mk{m.vx[k], m.vy[k]};
                                 double gradm = std::sqrt(sqr(mxx[k]) + sqr(mxy[k]) + sqr(myx[k]) + sqr(myy[k]));
                                 return mk.norm() * std::abs(1.0 - mk.norm2()) * gradm;
                               },
                               valid)
                    .value;
  out.rhs = kCurlFluxConstant / std::sqrt(beta) * flux;
  return out;
}

// m = R(grad u): the divergence-free rotation of a gradient field
inline VectorField rotated_gradient(const ScalarField& u) {
  VectorField g = gradient(u);
  VectorField m = g;
  for (std::size_t k = 0; k < g.vx.size(); ++k) {
    m.vx[k] = -g.vy[k];
    m.vy[k] = g.vx[k];
  }
  return m;
}

}  // namespace aglab
