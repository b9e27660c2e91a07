#pragma once

#include <functional>

#include "aglab/competitor.hpp"
#include "aglab/energy.hpp"
#include "aglab/minimize.hpp"
#include "aglab/symdiff.hpp"

namespace aglab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  // base-10 intercept: y ~ 10^intercept * x^slope
  double r_squared = 0.0;
  int n_points = 0;
};

inline FitResult loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ValidationError("loglog_fit: size mismatch");
  if (xs.size() < 3) throw ValidationError("loglog_fit needs at least 3 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ValidationError("loglog_fit needs positive data");
    lx.push_back(std::log10(xs[i]));
    ly.push_back(std::log10(ys[i]));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  FitResult f;
  f.n_points = static_cast<int>(lx.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw ValidationError("loglog_fit: degenerate abscissae");
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0, ybar = sy / n;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    ss_res += sqr(ly[i] - (f.intercept + f.slope * lx[i]));
    ss_tot += sqr(ly[i] - ybar);
  }
  f.r_squared = ss_tot > 0.0 ? clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return f;
}

struct TheoremReport {
  // stability exponents, as named constants (declared non-optimal, so they
  // are reported rather than asserted sharp)
  static constexpr double kSymdiffExponent = 1.0 / 512.0;    // |Omega symdiff B_1| vs energy
  static constexpr double kDeviationExponent = 1.0 / 256.0;  // gradient deviation vs beta
  static constexpr double kW12Exponent = 1.0 / 3000.0;       // w12 gap vs eps + alpha

  double beta_energy = 0.0;        // I_eps(u)
  double entropy_production = 0.0; // stability hypothesis integral (scales like beta)
  double eikonal_defect = 0.0;     // stability hypothesis integral (scales like beta^2)
  Vec2 best_center;
  double symdiff = 0.0;            // |Omega symdiff B_1(best_center)|
  double alpha = 0.0;              // inf_y |Omega symdiff B_1(y)|
  double deviation = 0.0;          // int |grad u + (z-x)/|z-x||^2
  double deviation_excluded_area = 0.0;
  double w12_gap = 0.0;            // ||u - zeta||_{W^{1,2}}
  double epsilon = 0.0;
  double h = 0.0;
  double excluded_area = 0.0;
  bool admissible = true;
  double boundary_residual = 0.0;

  nlohmann::json to_json() const {
    return {{"beta_energy", beta_energy},
            {"entropy_production", entropy_production},
            {"eikonal_defect", eikonal_defect},
            {"best_center", {best_center.x, best_center.y}},
            {"symdiff", symdiff},
            {"alpha", alpha},
            {"deviation", deviation},
            {"deviation_excluded_area", deviation_excluded_area},
            {"w12_gap", w12_gap},
            {"epsilon", epsilon},
            {"h", h},
            {"excluded_area", excluded_area},
            {"admissible", admissible},
            {"boundary_residual", boundary_residual},
            {"symdiff_exponent", kSymdiffExponent},
            {"deviation_exponent", kDeviationExponent},
            {"w12_exponent", kW12Exponent}};
  }
};

// Assemble the theorem-level quantities for a field on a normalized domain.
inline TheoremReport verify_theorem(const ConvexDomain& domain, const ScalarField& u, double eps) {
  if (domain.centroid().norm() > 1e-6 || std::abs(domain.diameter() - 2.0) > 1e-6)
    throw ValidationError("verify_theorem requires a normalized domain");
  TheoremReport rep;
  rep.epsilon = eps;
  rep.h = u.dm->spec.h;

  const EnergyReport er = aviles_giga_energy(u, eps);
  rep.beta_energy = er.total;
  rep.entropy_production = er.entropy_production;
  rep.eikonal_defect = er.eikonal_defect;
  rep.excluded_area = er.excluded_area;

  {
    VectorField g = gradient(u);
    double worst = 0.0;
    for (const TraceSample& t : boundary_trace_gradient(g, domain, 512))
      if (t.ok) worst = std::max(worst, std::abs(t.grad_dot_normal - 1.0));
    rep.boundary_residual = worst;
    rep.admissible = worst <= 0.05;
  }

  const BestFitBall ball = best_fit_ball(domain);
  rep.best_center = ball.center;
  rep.alpha = ball.alpha;
  rep.symdiff = ball.alpha;

  const GradientDeviation dev = gradient_deviation(u, domain, ball.center);
  rep.deviation = dev.value;
  rep.deviation_excluded_area = dev.excluded_disk_area;

  ScalarField zeta = ScalarField::sample(u.dm, [&](Vec2 p) { return domain.signed_distance(p); });
  rep.w12_gap = w12_distance(u, zeta);
  return rep;
}

enum class Pipeline { Competitor, Minimize };

inline Pipeline pipeline_from_string(const std::string& s) {
  if (s == "competitor") return Pipeline::Competitor;
  if (s == "minimize" || s == "minimizer") return Pipeline::Minimize;
  throw ValidationError("unknown pipeline: " + s);
}

struct SweepMember {
  ConvexDomain domain;
  double eps = 0.0;
  double beta = 0.0;
  std::string label;
};

struct SweepResult {
  std::vector<std::string> labels;
  std::vector<TheoremReport> reports;            // parallel to labels
  std::vector<std::string> failures;             // "label: what"
  FitResult fit_energy_vs_beta;                  // log I_eps(xi) vs log beta
  FitResult fit_w12_vs_eps_alpha;                // log w12_gap vs log(eps+alpha)
  FitResult fit_deviation_vs_energy;             // log deviation vs log I_eps(u)
  bool fits_valid = false;
};

struct SweepOptions {
  double h = 0.0;  // 0: eps/4 per member
  int q = 24;
  MinimizeOptions minimize;
  int threads = 1;
};

// Run the chosen pipeline on every family member and fit the scaling laws.
inline SweepResult exponent_sweep(const std::vector<SweepMember>& family, Pipeline pipeline,
                                  const SweepOptions& opts = {}) {
  if (family.size() < 3) throw ValidationError("sweep needs at least 3 family members");
  SweepResult out;
  std::vector<double> betas;
  for (const SweepMember& m : family) {
    try {
      const double h = opts.h > 0.0 ? opts.h : m.eps / 4.0;
      ScalarField u = build_competitor(m.domain, CompetitorParams(m.eps, m.beta, opts.q), h, opts.threads);
      if (pipeline == Pipeline::Minimize) {
        MinimizeOptions mo = opts.minimize;
        MinimizeResult res = minimize_field(m.domain, m.eps, mo, h, &u, opts.threads);
        u = res.u;
      }
      TheoremReport rep = verify_theorem(m.domain, u, m.eps);
      out.labels.push_back(m.label);
      out.reports.push_back(rep);
      betas.push_back(m.beta);
    } catch (const Error& e) {
      out.failures.push_back(m.label + ": " + e.what());
    }
  }
  if (out.reports.size() >= 3) {
    std::vector<double> energies, ea, w12, dev;
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
      const TheoremReport& r = out.reports[i];
      energies.push_back(r.beta_energy);
      ea.push_back(r.epsilon + r.alpha);
      w12.push_back(r.w12_gap);
      dev.push_back(r.deviation);
    }
    out.fit_energy_vs_beta = loglog_fit(betas, energies);
    out.fit_w12_vs_eps_alpha = loglog_fit(ea, w12);
    out.fit_deviation_vs_energy = loglog_fit(energies, dev);
    out.fits_valid = true;
  }
  return out;
}

}  // namespace aglab
