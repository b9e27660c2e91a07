#pragma once

#include <nlohmann/json.hpp>

#include "aglab/fields.hpp"

namespace aglab {

struct EnergyReport {
  double eps = 0.0;
  double penalty_term = 0.0;         // (1/2) eps^-1 int (1-|grad u|^2)^2
  double regularization_term = 0.0;  // (1/2) eps int |hess u|^2
  double total = 0.0;
  double entropy_production = 0.0;   // int |1-|grad u|^2| |hess u|
  double eikonal_defect = 0.0;       // int (1-|grad u|^2)^2
  double excluded_area = 0.0;
  std::size_t excluded_count = 0;
  double h = 0.0;
  bool coarse_grid_warning = false;

  nlohmann::json to_json() const {
    return {{"eps", eps},
            {"penalty_term", penalty_term},
            {"regularization_term", regularization_term},
            {"total", total},
            {"entropy_production", entropy_production},
            {"eikonal_defect", eikonal_defect},
            {"excluded_area", excluded_area},
            {"excluded_count", excluded_count},
            {"h", h},
            {"coarse_grid_warning", coarse_grid_warning}};
  }
};

namespace detail {

// shared validity set: nodes where both the gradient and the hessian exist,
// so every reported integral uses one common quadrature
inline std::vector<std::uint8_t> energy_valid(const VectorField& g, const HessianField& H) {
  std::vector<std::uint8_t> v(g.valid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = g.valid[k] && H.valid[k];
  return v;
}

}  // namespace detail

inline EnergyReport aviles_giga_energy(const ScalarField& u, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  const DomainMask& dm = *u.dm;
  EnergyReport rep;
  rep.eps = eps;
  rep.h = dm.spec.h;
  rep.coarse_grid_warning = dm.spec.h > eps / 4.0;

  const VectorField g = gradient(u);
  const HessianField H = hessian(u);
  const auto valid = detail::energy_valid(g, H);

  auto defect = [&](int k) { return 1.0 - (g.vx[k] * g.vx[k] + g.vy[k] * g.vy[k]); };
  auto pen = integrate_expr(dm, [&](int k) { return sqr(defect(k)); }, valid);
  auto reg = integrate_expr(dm, [&](int k) { return H.frob2(k); }, valid);
  auto ent = integrate_expr(dm, [&](int k) { return std::abs(defect(k)) * std::sqrt(H.frob2(k)); }, valid);

  rep.penalty_term = 0.5 / eps * pen.value;
  rep.regularization_term = 0.5 * eps * reg.value;
  rep.total = rep.penalty_term + rep.regularization_term;
  rep.entropy_production = ent.value;
  rep.eikonal_defect = pen.value;
  rep.excluded_area = pen.excluded_area;
  rep.excluded_count = pen.excluded_count;
  return rep;
}

inline double entropy_production(const ScalarField& u) {
  const VectorField g = gradient(u);
  const HessianField H = hessian(u);
  const auto valid = detail::energy_valid(g, H);
  return integrate_expr(*u.dm,
                        [&](int k) {
                          double p = 1.0 - (g.vx[k] * g.vx[k] + g.vy[k] * g.vy[k]);
                          return std::abs(p) * std::sqrt(H.frob2(k));
                        },
                        valid)
      .value;
}

inline double eikonal_defect(const ScalarField& u) {
  const VectorField g = gradient(u);
  const HessianField H = hessian(u);
  const auto valid = detail::energy_valid(g, H);
  return integrate_expr(*u.dm,
                        [&](int k) { return sqr(1.0 - (g.vx[k] * g.vx[k] + g.vy[k] * g.vy[k])); }, valid)
      .value;
}

struct GradientDeviation {
  double value = 0.0;
  double exclusion_radius = 0.0;   // hard exclusion disk around the center
  double excluded_disk_area = 0.0;
};

// int |grad u + (z-center)/|z-center||^2, excluding |z-center| < 2h. The
// integrand is bounded by 4, so the exclusion bias is at most 4*pi*(2h)^2.
inline GradientDeviation gradient_deviation(const ScalarField& u, const ConvexDomain& domain, Vec2 center) {
  if (domain.signed_distance(center) <= 0.0) throw ValidationError("deviation center lies outside the domain");
  const DomainMask& dm = *u.dm;
  const VectorField g = gradient(u);
  GradientDeviation out;
  out.exclusion_radius = 2.0 * dm.spec.h;
  const double r2min = sqr(out.exclusion_radius);
  const double cell = sqr(dm.spec.h);
  std::vector<std::uint8_t> valid(g.valid.size(), 0);
  for (int k : dm.dofs) {
    if (!g.valid[k]) continue;
    Vec2 z = dm.spec.node(k) - center;
    if (z.norm2() < r2min)
      out.excluded_disk_area += dm.weight[k] * cell;
    else
      valid[k] = 1;
  }
  out.value = integrate_expr(dm,
                             [&](int k) {
                               Vec2 z = dm.spec.node(k) - center;
                               Vec2 dir = z / z.norm();
                               return sqr(g.vx[k] + dir.x) + sqr(g.vy[k] + dir.y);
                             },
                             valid)
                  .value;
  return out;
}

}  // namespace aglab
