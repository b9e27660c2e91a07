#pragma once

#include "aglab/domain.hpp"
#include "aglab/quadrature.hpp"

namespace aglab {

// |Omega symdiff B_1(center)| by polar quadrature about the disk center.
// Along each ray the two regions are parameter intervals, so the radial
// integral is closed-form; only the angular integral is adaptive.
inline double disk_symmetric_difference(const ConvexDomain& domain, Vec2 center, double tol_area = 0.0) {
  if (tol_area <= 0.0) tol_area = 1e-6 * domain.area();
  auto weighted = [](double a, double b) {  // int_a^b t dt for 0 <= a <= b
    return 0.5 * (b * b - a * a);
  };
  auto per_angle = [&](double th) {
    Vec2 dir{std::cos(th), std::sin(th)};
    double a = 0.0, b = 0.0;  // ray-domain interval
    if (auto iv = domain.line_interval(center, dir)) {
      a = std::max(0.0, iv->first);
      b = std::max(0.0, iv->second);
    }
    const double mo = weighted(a, b);          // measure of Omega slice
    const double mb = 0.5;                     // measure of the unit-disk slice
    const double ia = std::min(std::max(a, 0.0), 1.0);
    const double ib = std::min(b, 1.0);
    const double mi = ib > ia ? weighted(ia, ib) : 0.0;
    return mo + mb - 2.0 * mi;
  };
  double acc = 0.0;
  const int panels = 16;
  for (int p = 0; p < panels; ++p) {
    double t0 = 2.0 * kPi * p / panels, t1 = 2.0 * kPi * (p + 1) / panels;
    acc += adaptive_simpson(per_angle, t0, t1, tol_area / panels);
  }
  return acc;
}

struct BestFitBall {
  Vec2 center;
  double alpha = 0.0;  // attained |Omega symdiff B_1(center)|
};

// Derivative-free compass search from the centroid; step halves until it
// drops below tol_center.
inline BestFitBall best_fit_ball(const ConvexDomain& domain, double tol_center = kTolCenter,
                                 double tol_area = 0.0) {
  Vec2 c = domain.centroid();
  double f = disk_symmetric_difference(domain, c, tol_area);
  double step = 0.1;
  while (step >= tol_center) {
    bool improved = false;
    Vec2 best_c = c;
    double best_f = f;
    const Vec2 dirs[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    for (Vec2 d : dirs) {
      Vec2 cand = c + d * step;
      double fc = disk_symmetric_difference(domain, cand, tol_area);
      if (fc < best_f - 1e-15) {
        best_f = fc;
        best_c = cand;
        improved = true;
      }
    }
    if (improved) {
      c = best_c;
      f = best_f;
    } else {
      step *= 0.5;
    }
  }
  return {c, f};
}

}  // namespace aglab
