#include <catch2/catch.hpp>

#include <random>

#include "aglab/minimize.hpp"

using namespace aglab;

namespace {

const ConvexDomain& unit_disk() {
  static ConvexDomain d = ConvexDomain::disk({0, 0}, 1.0);
  return d;
}

}  // namespace

TEST_CASE("adjoint gradient matches directional finite differences", "[minimize]") {
  const double eps = 0.08, h = 0.02;
  MaskPtr dm = rasterize(unit_disk(), h);
  DiscreteObjective obj(unit_disk(), dm, eps, 1e3);

  ScalarField u0 = ScalarField::sample(dm, [](Vec2 p) { return (1.0 - p.norm()) * 0.9 + 0.05 * std::sin(3.0 * p.x); });
  std::vector<double> x = u0.v, g(x.size(), 0.0);
  double E0 = obj.energy_and_gradient(x, &g);
  CHECK(std::isfinite(E0));

  std::mt19937 rng(31415);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double t = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> dir(x.size(), 0.0);
    double norm = 0.0;
    for (int k : dm->dofs) {
      dir[k] = nd(rng);
      norm += dir[k] * dir[k];
    }
    norm = std::sqrt(norm);
    double gd = 0.0;
    for (int k : dm->dofs) {
      dir[k] /= norm;
      gd += g[k] * dir[k];
    }
    std::vector<double> xp = x, xm = x;
    for (int k : dm->dofs) {
      xp[k] += t * dir[k];
      xm[k] -= t * dir[k];
    }
    double fd = (obj.energy_and_gradient(xp, nullptr) - obj.energy_and_gradient(xm, nullptr)) / (2.0 * t);
    REQUIRE(fd == Approx(gd).epsilon(1e-5));
  }
}

TEST_CASE("boundary penalty of the zero field is the perimeter", "[minimize]") {
  const double eps = 0.08, h = 0.02, lam = 1e3;
  MaskPtr dm = rasterize(unit_disk(), h);
  DiscreteObjective obj(unit_disk(), dm, eps, lam);
  std::vector<double> zero(dm->spec.count(), 0.0);
  // bulk = (1/2) eps^{-1} * area, penalty = lam * perimeter * (1 + O(h^2))
  double E = obj.energy_and_gradient(zero, nullptr);
  double bulk = 0.5 / eps * kPi;
  CHECK(E - bulk == Approx(lam * 2.0 * kPi).epsilon(0.01));
}

TEST_CASE("descent from the competitor seed", "[minimize]") {
  const double eps = 0.05, h = eps / 4.0;
  MinimizeOptions opts;
  opts.max_iters = 60;
  opts.seed_q = 16;
  MinimizeResult res = minimize_field(unit_disk(), eps, opts, h);

  REQUIRE(res.trace.size() >= 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i].energy <= res.trace[i - 1].energy + 1e-12);
  CHECK(res.final_energy <= res.trace.front().energy);
  CHECK_FALSE(res.stalled);

  // seeding from the competitor never loses to the competitor's own objective
  ScalarField seed = build_competitor(unit_disk(), CompetitorParams(eps, 16.0 * eps * eps, 16), h);
  DiscreteObjective obj(unit_disk(), seed.dm, eps, opts.boundary_penalty_weight);
  CHECK(res.final_energy <= obj.energy_and_gradient(seed.v, nullptr) + 1e-12);
}

TEST_CASE("penalty weight controls the boundary residual", "[minimize][property]") {
  const double eps = 0.08, h = eps / 4.0;
  double residuals[3];
  int i = 0;
  for (double lam : {1e2, 1e3, 1e4}) {
    MinimizeOptions opts;
    opts.max_iters = 500;  // residuals must reflect the penalty, not the iteration budget
    opts.grad_tol = 1e-4;
    opts.boundary_penalty_weight = lam;
    opts.seed_q = 16;
    MinimizeResult res = minimize_field(unit_disk(), eps, opts, h);
    residuals[i++] = std::max(res.boundary_residual_value, res.boundary_residual_grad);
  }
  // C / sqrt(lambda) envelope with C fitted at the smallest weight
  double C = residuals[0] * std::sqrt(1e2);
  CHECK(residuals[1] <= 1.5 * C / std::sqrt(1e3));
  CHECK(residuals[2] <= 1.5 * C / std::sqrt(1e4));
}

TEST_CASE("grid-aligned translation invariance", "[minimize]") {
  const double eps = 0.08, h = 0.02;
  MinimizeOptions opts;
  opts.max_iters = 25;
  opts.seed = MinimizeOptions::Seed::Zero;  // origin-anchored seeds would break covariance
  // generic center and radius keep cell-classification thresholds away from
  // exact lattice coincidences
  ConvexDomain dom = ConvexDomain::disk({0.0131, -0.0072}, 0.937);
  MinimizeResult base = minimize_field(dom, eps, opts, h);

  const Vec2 shift{8.0 * h, -5.0 * h};
  ConvexDomain moved = dom.translate(shift);
  MinimizeResult shifted = minimize_field(moved, eps, opts, h, nullptr);

  const GridSpec& g0 = base.u.dm->spec;
  const GridSpec& g1 = shifted.u.dm->spec;
  REQUIRE(g0.nx == g1.nx);
  double worst = 0.0;
  for (int k : base.u.dm->dofs) {
    Vec2 p = g0.node(k);
    Vec2 q = p + shift;
    int i = static_cast<int>(std::lround((q.x - g1.origin.x) / g1.h));
    int j = static_cast<int>(std::lround((q.y - g1.origin.y) / g1.h));
    REQUIRE(g1.in_bounds(i, j));
    worst = std::max(worst, std::abs(shifted.u.v[g1.idx(i, j)] - base.u.v[k]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("validation of options and grid", "[minimize]") {
  MinimizeOptions bad;
  bad.boundary_penalty_weight = 0.0;
  CHECK_THROWS_AS(minimize_field(unit_disk(), 0.08, bad, 0.02), ValidationError);
  MinimizeOptions ok;
  CHECK_THROWS_AS(minimize_field(unit_disk(), 0.08, ok, 0.05), ValidationError);  // h > eps/4
}

TEST_CASE("NaN in the field is reported as a numerical failure", "[minimize]") {
  const double eps = 0.08, h = 0.02;
  MaskPtr dm = rasterize(unit_disk(), h);
  DiscreteObjective obj(unit_disk(), dm, eps, 1e3);
  std::vector<double> x(dm->spec.count(), 0.0);
  x[dm->dofs[17]] = std::nan("");
  CHECK_THROWS_AS(obj.energy_and_gradient(x, nullptr), NumericError);
}
