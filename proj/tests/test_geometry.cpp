#include <catch2/catch.hpp>

#include <random>

#include "aglab/domain.hpp"
#include "aglab/symdiff.hpp"

using namespace aglab;

namespace {

// Dense boundary sampling oracle: brute-force minimum of |x - p| over N
// uniformly spaced boundary parameters, then golden-section refinement of the
// arclength parameter around the winning sample.
double dense_boundary_distance(const ConvexDomain& dom, Vec2 x, int n, Vec2* argmin = nullptr) {
  double best = 1e300, sbest = 0.0;
  for (const BoundarySample& s : dom.boundary_samples(n)) {
    double d = (x - s.point).norm();
    if (d < best) {
      best = d;
      sbest = s.arclength;
    }
  }
  const double step = dom.perimeter() / n;
  double lo = sbest - step, hi = sbest + step;
  auto f = [&](double s) { return (x - dom.boundary_sample_at(s).point).norm(); };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d2 = lo + gr * (hi - lo), fc = f(c), fd = f(d2);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      hi = d2;
      d2 = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d2;
      fc = fd;
      d2 = lo + gr * (hi - lo);
      fd = f(d2);
    }
  }
  double smin = 0.5 * (lo + hi);
  if (argmin) *argmin = dom.boundary_sample_at(smin).point;
  return f(smin);
}

// Monte-Carlo area of Omega symdiff B_1(center) with a fixed seed.
std::pair<double, double> mc_symdiff(const ConvexDomain& dom, Vec2 center, int n) {
  std::mt19937 rng(12345);
  auto [lo, hi] = dom.bbox();
  lo.x = std::min(lo.x, center.x - 1.0);
  lo.y = std::min(lo.y, center.y - 1.0);
  hi.x = std::max(hi.x, center.x + 1.0);
  hi.y = std::max(hi.y, center.y + 1.0);
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
  const double box = (hi.x - lo.x) * (hi.y - lo.y);
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    Vec2 p{ux(rng), uy(rng)};
    bool in_dom = dom.contains(p);
    bool in_ball = (p - center).norm2() <= 1.0;
    if (in_dom != in_ball) ++hits;
  }
  double frac = static_cast<double>(hits) / n;
  double est = frac * box;
  double se = box * std::sqrt(frac * (1.0 - frac) / n);
  return {est, se};
}

// circle-circle symmetric difference: 2*pi - 2*lens(d) for unit circles
double two_unit_disks_symdiff(double d) {
  double lens = 0.0;
  if (d < 2.0) lens = 2.0 * std::acos(d / 2.0) - 0.5 * d * std::sqrt(4.0 - d * d);
  return 2.0 * kPi - 2.0 * lens;
}

ConvexDomain unit_area_ellipse() { return ConvexDomain::ellipse({0, 0}, 1.05, 1.0 / 1.05, 0.0); }

}  // namespace

TEST_CASE("signed distance on disks", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0);
  CHECK(d.signed_distance({0, 0}) == Approx(1.0).margin(1e-14));
  CHECK(d.signed_distance({2, 0}) == Approx(-1.0).margin(1e-14));
  CHECK(d.signed_distance({0.0, 1.0}) == Approx(0.0).margin(1e-14));
}

TEST_CASE("ellipse distance matches the dense sampling oracle", "[geometry]") {
  auto e = unit_area_ellipse();
  Vec2 x{0.5, 0.0};
  double oracle = dense_boundary_distance(e, x, 1000000);
  CHECK(e.signed_distance(x) == Approx(oracle).margin(1e-8));

  // a few more probes, inside and outside
  for (Vec2 p : {Vec2{0.2, 0.4}, Vec2{-0.9, 0.1}, Vec2{1.4, 0.3}, Vec2{0.0, -1.2}}) {
    double od = dense_boundary_distance(e, p, 1000000);
    CHECK(std::abs(e.signed_distance(p)) == Approx(od).margin(1e-8));
  }
}

TEST_CASE("metric projection", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0);
  Vec2 b = d.metric_projection({0.3, 0.0});
  CHECK(b.x == Approx(1.0).margin(1e-12));
  CHECK(b.y == Approx(0.0).margin(1e-12));

  auto e = unit_area_ellipse();
  Vec2 x{0.31, 0.22};
  Vec2 oracle_pt;
  dense_boundary_distance(e, x, 1000000, &oracle_pt);
  Vec2 p = e.metric_projection(x);
  CHECK((p - oracle_pt).norm() < 1e-6);

  // square-ish rounded polygon, projection from the incenter lands on an
  // analytic per-edge foot point
  auto rp = ConvexDomain::rounded_polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, 0.1);
  Vec2 foot = rp.metric_projection({0.0, 0.0});
  bool matches = false;
  for (Vec2 cand : {Vec2{0.6, 0.0}, Vec2{-0.6, 0.0}, Vec2{0.0, 0.6}, Vec2{0.0, -0.6}})
    if ((foot - cand).norm() < 1e-12) matches = true;
  CHECK(matches);
}

TEST_CASE("inward normals", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0);
  Vec2 n = d.inward_normal({0.0, 1.0});
  CHECK(n.x == Approx(0.0).margin(1e-12));
  CHECK(n.y == Approx(-1.0).margin(1e-12));

  auto e = unit_area_ellipse();
  Vec2 ne = e.inward_normal({1.05, 0.0});
  CHECK(ne.x == Approx(-1.0).margin(1e-9));
  CHECK(ne.y == Approx(0.0).margin(1e-9));

  auto st = ConvexDomain::stadium({-0.5, 0.0}, {0.5, 0.0}, 0.3);
  double phi = 0.5;  // cap angle from the +x axis
  Vec2 cap{0.5 + 0.3 * std::cos(phi), 0.3 * std::sin(phi)};
  Vec2 ns = st.inward_normal(cap);
  CHECK(ns.x == Approx(-std::cos(phi)).margin(1e-12));
  CHECK(ns.y == Approx(-std::sin(phi)).margin(1e-12));

  auto corner = ConvexDomain::rounded_polygon({{0, 0}, {1, 0}, {0.5, 1}}, 0.0);
  CHECK_THROWS_AS(corner.inward_normal({1.0, 0.0}), ValidationError);
}

TEST_CASE("curvature queries", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 0.5);
  CHECK(d.curvature({0.5, 0.0}) == Approx(2.0).margin(1e-12));

  auto e = ConvexDomain::ellipse({0, 0}, 1.2, 0.7, 0.0);
  CHECK(e.curvature({1.2, 0.0}) == Approx(1.2 / (0.7 * 0.7)).margin(1e-9));

  auto rp = ConvexDomain::rounded_polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, 0.1);
  CHECK(rp.curvature({0.0, -0.6}) == Approx(0.0).margin(1e-12));

  auto sharp = ConvexDomain::rounded_polygon({{0, 0}, {1, 0}, {0.5, 1}}, 0.0);
  CHECK_THROWS_AS(sharp.curvature({1.0, 0.0}), ValidationError);
}

TEST_CASE("enlarge is the Minkowski sum with a disk", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0).enlarge(0.1);
  CHECK(d.kind() == ConvexDomain::Kind::Disk);
  CHECK(d.signed_distance({0, 0}) == Approx(1.1).margin(1e-12));

  auto rp = ConvexDomain::rounded_polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}, 0.05);
  auto rp2 = rp.enlarge(0.07);
  CHECK(rp2.offset_radius() == Approx(0.12));
  CHECK(rp2.area() == Approx(1.0 + 0.12 * 4.0 + kPi * 0.12 * 0.12).margin(1e-12));

  // Steiner formula for the ellipse offset, checked against Monte-Carlo area
  auto e = unit_area_ellipse();
  double r = 0.1;
  auto er = e.enlarge(r);
  double steiner = e.area() + r * e.perimeter() + kPi * r * r;
  CHECK(er.area() == Approx(steiner).margin(1e-8));
  auto [mc, se] = mc_symdiff(er, {5.0, 0.0}, 2000000);  // far ball: symdiff = area + pi
  CHECK(std::abs((er.area() + kPi) - mc) < 3.0 * se);
}

TEST_CASE("disk symmetric difference", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0);
  CHECK(disk_symmetric_difference(d, {0, 0}) == Approx(0.0).margin(1e-6));

  CHECK(disk_symmetric_difference(d, {2.0, 0.0}) == Approx(two_unit_disks_symdiff(2.0)).margin(1e-8));
  CHECK(disk_symmetric_difference(d, {0.5, 0.0}) == Approx(two_unit_disks_symdiff(0.5)).margin(1e-8));
  CHECK(disk_symmetric_difference(d, {1.3, 0.4}) ==
        Approx(two_unit_disks_symdiff(Vec2{1.3, 0.4}.norm())).margin(1e-8));

  auto e = unit_area_ellipse();
  double quad = disk_symmetric_difference(e, {0, 0});
  auto [mc, se] = mc_symdiff(e, {0, 0}, 10000000);
  CHECK(std::abs(quad - mc) < 3.0 * se);
}

TEST_CASE("best fit ball", "[geometry]") {
  auto d = ConvexDomain::disk({0, 0}, 1.0);
  auto fit = best_fit_ball(d);
  CHECK(fit.center.norm() < 2.0 * kTolCenter);
  CHECK(fit.alpha < 1e-5);

  Vec2 c{0.7, -0.3};
  auto fit2 = best_fit_ball(ConvexDomain::disk(c, 1.0));
  CHECK((fit2.center - c).norm() < 2.0 * kTolCenter);

  // grid-scan oracle on an eccentric ellipse
  auto e = ConvexDomain::ellipse({0, 0}, 1.0, 0.93, 0.0);
  auto fit3 = best_fit_ball(e);
  double oracle = 1e300;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j)
      oracle = std::min(oracle, disk_symmetric_difference(e, {0.02 * i, 0.02 * j}));
  CHECK(fit3.alpha <= oracle * 1.01 + 1e-9);
  CHECK(fit3.alpha >= oracle * 0.99 - 1e-9);
}

TEST_CASE("normalize produces centroid 0 and diameter 2", "[geometry]") {
  auto d = ConvexDomain::disk({5, 3}, 3.0).normalize();
  CHECK(d.centroid().norm() < 1e-12);
  CHECK(d.diameter() == Approx(2.0).epsilon(1e-10));
  CHECK(d.signed_distance({0, 0}) == Approx(1.0).margin(1e-12));

  auto e = ConvexDomain::ellipse({1, 1}, 2.2, 1.4, 0.3).normalize();
  CHECK(e.diameter() == Approx(2.0).epsilon(1e-10));
  CHECK(e.centroid().norm() < 1e-12);

  auto rp = ConvexDomain::rounded_polygon({{0, 0}, {2, 0.1}, {2.3, 1.4}, {0.4, 1.9}}, 0.2).normalize();
  CHECK(rp.centroid().norm() < 1e-10);
  // rotating-calipers style oracle: max pairwise distance over dense boundary samples
  double dmax = 0.0;
  auto samples = rp.boundary_samples(4096);
  for (std::size_t i = 0; i < samples.size(); i += 2)
    for (std::size_t j = i; j < samples.size(); j += 2)
      dmax = std::max(dmax, (samples[i].point - samples[j].point).norm());
  CHECK(dmax == Approx(2.0).margin(1e-4));
  CHECK(rp.diameter() == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("signed distance is 1-Lipschitz and concave inside", "[geometry][property]") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<ConvexDomain> doms;
  doms.push_back(ConvexDomain::disk({0.1, -0.2}, 0.9));
  doms.push_back(unit_area_ellipse());
  doms.push_back(ConvexDomain::rounded_polygon({{-0.8, -0.5}, {0.7, -0.6}, {0.9, 0.4}, {-0.2, 0.8}}, 0.15));
  doms.push_back(ConvexDomain::stadium({-0.4, 0.0}, {0.5, 0.2}, 0.45));
  for (const auto& dom : doms) {
    for (int trial = 0; trial < 400; ++trial) {
      Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
      double da = dom.signed_distance(a), db = dom.signed_distance(b);
      CHECK(std::abs(da - db) <= (a - b).norm() + kTolGeom);
    }
    // concavity of the interior distance
    for (int trial = 0; trial < 400; ++trial) {
      Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
      if (dom.signed_distance(a) <= 0.0 || dom.signed_distance(b) <= 0.0) continue;
      double lam = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      Vec2 mid = a * lam + b * (1.0 - lam);
      CHECK(dom.signed_distance(mid) >=
            lam * dom.signed_distance(a) + (1.0 - lam) * dom.signed_distance(b) - kTolGeom);
    }
    // projection consistency: the normal at the foot is parallel to x - foot
    for (int trial = 0; trial < 200; ++trial) {
      Vec2 x{u(rng), u(rng)};
      if (dom.signed_distance(x) <= 1e-3) continue;
      Vec2 foot = dom.metric_projection(x);
      if ((x - foot).norm() < 1e-6) continue;
      Vec2 dir = (x - foot).normalized();
      Vec2 nrm;
      try {
        nrm = dom.inward_normal(foot);
      } catch (const ValidationError&) {
        continue;  // corner foot
      }
      CHECK(std::abs(dir.cross(nrm)) < 1e-8);
    }
  }
}

TEST_CASE("boundary samples carry unit normals and nonnegative curvature", "[geometry][property]") {
  for (const auto& dom :
       {ConvexDomain::disk({0, 0}, 1.0), unit_area_ellipse(),
        ConvexDomain::rounded_polygon({{-0.6, -0.6}, {0.8, -0.4}, {0.6, 0.7}, {-0.4, 0.6}}, 0.1),
        ConvexDomain::stadium({-0.3, -0.1}, {0.4, 0.3}, 0.5)}) {
    for (const BoundarySample& s : dom.boundary_samples(257)) {
      CHECK(std::abs(s.inward_normal.norm() - 1.0) < 1e-12);
      CHECK(s.curvature >= 0.0);
      CHECK(std::abs(dom.signed_distance(s.point)) < 1e-9);
    }
  }
}

TEST_CASE("near-disk boundary facts on the ellipse family", "[geometry][property]") {
  // fit the constants at beta = 0.04, reuse with margin at smaller beta
  auto member = [](double beta) {
    return ConvexDomain::ellipse({0, 0}, 1.0, 1.0 - beta / kPi, 0.0);
  };
  auto measure = [&](const ConvexDomain& dom) {
    double worst_radial = 0.0, worst_normal = 0.0;
    for (int k = 0; k < 256; ++k) {
      double th = 2.0 * kPi * k / 256;
      Vec2 dir{std::cos(th), std::sin(th)};
      auto iv = dom.line_interval({0, 0}, dir);
      REQUIRE(iv.has_value());
      Vec2 a = dir * iv->second;
      worst_radial = std::max(worst_radial, std::abs(a.norm() - 1.0));
      Vec2 eta = dom.inward_normal(dom.metric_projection(a * (1.0 + 1e-12) + Vec2{0, 0}));
      worst_normal = std::max(worst_normal, (eta + dir).norm());
    }
    return std::pair{worst_radial, worst_normal};
  };
  const double beta0 = 0.04;
  auto [r0, n0] = measure(member(beta0));
  double c_radial = r0 / std::sqrt(beta0);
  double c_normal = n0 / std::pow(beta0, 0.25);
  for (double beta : {0.02, 0.01}) {
    auto [r, nn] = measure(member(beta));
    CHECK(r <= 1.5 * c_radial * std::sqrt(beta) + 1e-12);
    CHECK(nn <= 1.5 * c_normal * std::pow(beta, 0.25) + 1e-12);
  }
}

TEST_CASE("domain JSON round trip", "[geometry]") {
  auto e = ConvexDomain::ellipse({0.1, -0.2}, 1.05, 0.9524, 0.3);
  auto j = e.to_json();
  CHECK(j["shape"] == "ellipse");
  auto e2 = ConvexDomain::from_json(j);
  CHECK(e2.area() == Approx(e.area()));
  CHECK(e2.signed_distance({0.4, 0.2}) == Approx(e.signed_distance({0.4, 0.2})).margin(1e-12));

  auto st = ConvexDomain::stadium({-1, 0}, {1, 0.5}, 0.7);
  auto st2 = ConvexDomain::from_json(st.to_json());
  CHECK(st2.perimeter() == Approx(st.perimeter()));

  CHECK_THROWS_AS(ConvexDomain::from_json(nlohmann::json{{"shape", "blob"}}), ValidationError);
}

TEST_CASE("convexity validation", "[geometry]") {
  CHECK_THROWS_AS(ConvexDomain::rounded_polygon({{0, 0}, {1, 0}, {0.5, 0.1}, {0.5, -0.5}}, 0.1),
                  ValidationError);
  CHECK_THROWS_AS(ConvexDomain::disk({0, 0}, -1.0), ValidationError);
  CHECK_THROWS_AS(ConvexDomain::ellipse({0, 0}, 0.5, 0.9, 0.0), ValidationError);
}
