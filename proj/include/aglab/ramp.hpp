#pragma once

#include <array>

#include "aglab/core.hpp"

namespace aglab {

// Quintic polynomial matching value / first / second derivative at both ends
// of [x0,x1]. Closed form, C2 across the joins by construction.
class QuinticBridge {
 public:
  QuinticBridge() = default;
  QuinticBridge(double x0, double x1, double f0, double d0, double s0, double f1, double d1, double s1)
      : x0_(x0), len_(x1 - x0) {
    if (!(len_ > 0.0)) throw ValidationError("quintic bridge needs x1 > x0");
    const double L = len_;
    // Hermite basis in t = (x-x0)/L, derivatives scaled by L
    const double D0 = d0 * L, S0 = s0 * L * L;
    const double D1 = d1 * L, S1 = s1 * L * L;
    c_[0] = f0;
    c_[1] = D0;
    c_[2] = 0.5 * S0;
    c_[3] = 10.0 * (f1 - f0) - 6.0 * D0 - 4.0 * D1 - 1.5 * S0 + 0.5 * S1;
    c_[4] = -15.0 * (f1 - f0) + 8.0 * D0 + 7.0 * D1 + 1.5 * S0 - S1;
    c_[5] = 6.0 * (f1 - f0) - 3.0 * (D0 + D1) - 0.5 * S0 + 0.5 * S1;
  }

  double value(double x) const {
    double t = (x - x0_) / len_;
    return ((((c_[5] * t + c_[4]) * t + c_[3]) * t + c_[2]) * t + c_[1]) * t + c_[0];
  }
  double deriv1(double x) const {
    double t = (x - x0_) / len_;
    return ((((5.0 * c_[5] * t + 4.0 * c_[4]) * t + 3.0 * c_[3]) * t + 2.0 * c_[2]) * t + c_[1]) / len_;
  }
  double deriv2(double x) const {
    double t = (x - x0_) / len_;
    return (((20.0 * c_[5] * t + 12.0 * c_[4]) * t + 6.0 * c_[3]) * t + 2.0 * c_[2]) / (len_ * len_);
  }
  double deriv3(double x) const {
    double t = (x - x0_) / len_;
    return ((60.0 * c_[5] * t + 24.0 * c_[4]) * t + 6.0 * c_[3]) / (len_ * len_ * len_);
  }

 private:
  double x0_ = 0.0, len_ = 1.0;
  std::array<double, 6> c_{};
};

// Monotone C2 ramp: s(x)=0 for x<=0, s(x)=x for x>=delta, quintic in between.
// Measured on the closed form: max|s''| = kSecondDerivBound/delta and
// max|s'''| = kThirdDerivBound/delta^2.
class SmoothRamp {
 public:
  static constexpr double kSecondDerivBound = 3.9403;  // sup |s''| * delta
  static constexpr double kThirdDerivBound = 36.0;     // sup |s'''| * delta^2

  explicit SmoothRamp(double delta) : delta_(delta) {
    if (!(delta > 0.0) || delta > 1.0) throw ValidationError("ramp width must lie in (0,1]");
    mid_ = QuinticBridge(0.0, delta, 0.0, 0.0, 0.0, delta, 1.0, 0.0);
  }

  double delta() const { return delta_; }

  double value(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= delta_) return x;
    return mid_.value(x);
  }
  double deriv1(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= delta_) return 1.0;
    return mid_.deriv1(x);
  }
  double deriv2(double x) const {
    if (x <= 0.0 || x >= delta_) return 0.0;
    return mid_.deriv2(x);
  }
  double deriv3(double x) const {
    if (x <= 0.0 || x >= delta_) return 0.0;
    return mid_.deriv3(x);
  }

 private:
  double delta_;
  QuinticBridge mid_;
};

// Monotone C2 width map: w(z)=z on [0, eps/3), w(z)=eps for z>=eps.
// Measured bound: max|w''| = kSecondDerivBound/eps.
class WidthRamp {
 public:
  static constexpr double kSecondDerivBound = 5.9112;  // sup |w''| * eps

  explicit WidthRamp(double eps) : eps_(eps) {
    if (!(eps > 0.0)) throw ValidationError("width ramp needs eps > 0");
    mid_ = QuinticBridge(eps / 3.0, eps, eps / 3.0, 1.0, 0.0, eps, 0.0, 0.0);
  }

  double eps() const { return eps_; }

  double value(double z) const {
    if (z <= 0.0) return 0.0;  // callers only use z >= 0
    if (z < eps_ / 3.0) return z;
    if (z >= eps_) return eps_;
    return mid_.value(z);
  }
  double deriv1(double z) const {
    if (z <= 0.0 || z >= eps_) return 0.0;
    if (z < eps_ / 3.0) return 1.0;
    return mid_.deriv1(z);
  }
  double deriv2(double z) const {
    if (z <= eps_ / 3.0 || z >= eps_) return 0.0;
    return mid_.deriv2(z);
  }

 private:
  double eps_;
  QuinticBridge mid_;
};

}  // namespace aglab
