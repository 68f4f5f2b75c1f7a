#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/lift.hpp"
#include "mpep/maslov.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/river.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

namespace {

const IvdpDrift& field() {
  static IvdpDrift f(0.5);
  return f;
}

const PeriodicOrbit& orbit() {
  static PeriodicOrbit o = find_periodic_orbit(field());
  return o;
}

const LocalUnstableManifold& wu() {
  static LocalUnstableManifold m = build_unstable_manifold(field());
  return m;
}

const std::vector<Heteroclinic>& hets() {
  static std::vector<Heteroclinic> h = find_heteroclinics(
      field(), wu(), build_stable_mesh(field(), orbit()), orbit());
  return h;
}

const RiverInterval& river() {
  static RiverInterval r = find_river(field(), wu(), orbit(), hets());
  return r;
}

const Pivot& pivot() {
  static Pivot p = pivot_theta(field(), wu(), orbit(), river());
  return p;
}

constexpr double kTheta1 = 4.778099049823;
constexpr double kTheta2 = 2.878461721041;
constexpr double kThetaHat = 3.613787919070;

}  // namespace

TEST_CASE("river banks are the heteroclinic angles") {
  const auto& r = river();
  CHECK(r.theta1 == doctest::Approx(kTheta1).epsilon(1e-9));
  CHECK(r.theta2 == doctest::Approx(kTheta2).epsilon(1e-9));
  CHECK(r.lo() == r.theta2);
  CHECK(r.hi() == r.theta1);
  CHECK(r.width() == doctest::Approx(kTheta1 - kTheta2).epsilon(1e-9));
  CHECK(r.inside(3.6));
  CHECK_FALSE(r.inside(2.0));
  CHECK_FALSE(r.inside(5.0));
}

TEST_CASE("transition map produces torus points across the interior") {
  const auto& r = river();
  const int n = 33;
  for (int i = 1; i <= n; ++i) {
    const double theta = r.lo() + r.width() * i / (n + 1.0);
    CAPTURE(theta);
    const auto ep = transition_map(field(), wu(), orbit(), theta);
    REQUIRE(ep.has_value());
    CHECK(std::abs(hamiltonian(field(), ep->raw)) <= 1e-7);
    CHECK(orbit().distance(ep->raw[0], ep->raw[1]) <= 1e-8);
    CHECK(std::abs(hamiltonian(field(), ep->state)) <= 1e-10);
    CHECK(norm(ep->state - ep->raw) <= 5e-5);
    CHECK(ep->t_exit > 2.0);
    CHECK(ep->t_exit < 20.0);
    CHECK(ep->s >= 0.0);
    CHECK(ep->s < orbit().total_arc());
    CHECK_FALSE(ep->flagged);
    if (theta < kThetaHat - 0.02) CHECK(ep->maslov_index == 1);
    if (theta > kThetaHat + 0.02) CHECK(ep->maslov_index == 0);
  }
  CHECK_FALSE(transition_map(field(), wu(), orbit(), r.theta1).has_value());
  CHECK_FALSE(transition_map(field(), wu(), orbit(), r.theta2).has_value());
}

TEST_CASE("pivot separates the winding regimes") {
  const auto& p = pivot();
  CHECK(p.theta_hat == doctest::Approx(kThetaHat).epsilon(1e-8));
  CHECK(std::abs(p.tau_conj - p.tau_exit) <= 1e-6);
  CHECK(p.brackets.size() == 1);
  CHECK(p.exit.s == doctest::Approx(5.206161).epsilon(1e-3));
  CHECK(p.exit.t_exit == doctest::Approx(4.343519).epsilon(1e-3));
  CHECK(p.exit.winding == 0);

  PivotConfig coarse;
  coarse.seed_samples = 199;
  const auto q = pivot_theta(field(), wu(), orbit(), river(), coarse);
  CHECK(std::abs(q.theta_hat - p.theta_hat) <= 1e-9);
}

TEST_CASE("exit points recover their crossing") {
  for (double theta : {3.0, 3.7, 4.44}) {
    CAPTURE(theta);
    const auto ep = transition_map(field(), wu(), orbit(), theta);
    REQUIRE(ep.has_value());
    auto rhs = [&](double, const Vec4& s, Vec4& ds) {
      ds = lift_rhs(field(), s);
    };
    IntegratorConfig cfg;
    cfg.store_dense = false;
    const auto back = integrate<4>(rhs, ep->raw, 0.0, -ep->t_exit, cfg);
    CHECK(norm(back.final_state() - wu().k_point(theta)) <= 1e-6);
  }
}

TEST_CASE("mouth covers the full circle of exits") {
  const auto mouth = mouth_of_river(field(), wu(), orbit(), river(), pivot());
  REQUIRE(mouth.size() >= 250);

  const double arc = orbit().total_arc();
  CHECK(std::abs(mouth.front().s - pivot().exit.s) <= 0.01);
  CHECK(mouth.back().winding >= 1);

  int wprev = mouth.front().winding;
  for (const auto& ep : mouth) {
    CHECK(ep.winding >= wprev);
    wprev = ep.winding;
    CHECK(std::abs(hamiltonian(field(), ep.raw)) <= 1e-7);
  }

  std::vector<double> s;
  for (const auto& ep : mouth) s.push_back(ep.s);
  std::sort(s.begin(), s.end());
  double gap = s.front() + arc - s.back();
  for (std::size_t i = 1; i < s.size(); ++i)
    gap = std::max(gap, s[i] - s[i - 1]);
  CHECK(gap <= 0.01 * arc);
}

TEST_CASE("second variation grants the sub-river") {
  const double lo = kThetaHat + 0.1, hi = kTheta1 - 0.03;
  for (int i = 0; i < 10; ++i) {
    const double theta = lo + (hi - lo) * i / 9.0;
    CAPTURE(theta);
    const auto sv = second_variation_check(field(), wu(), orbit(), theta);
    CHECK(sv.granted);
    REQUIRE(sv.probes.size() == 10);
    CHECK(sv.probes[0] == 0.0);
    CHECK(sv.min_probe >= 0.0);
    CHECK(sv.symmetry_defect <= 1e-6);
    CHECK(sv.form_gap <= 1e-6);
    CHECK(sv.v1_max_cond < 100.0);
  }
}

TEST_CASE("second variation refuses an index-1 angle") {
  const auto sv = second_variation_check(field(), wu(), orbit(), 3.2);
  CHECK_FALSE(sv.granted);
}

TEST_CASE("mirror river exits oppositely") {
  const double theta = 3.2;
  const auto a = transition_map(field(), wu(), orbit(), theta);
  const auto b = transition_map(field(), wu(), orbit(), theta - M_PI);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(norm(a->state + b->state) <= 1e-7);
  CHECK(std::abs(a->t_exit - b->t_exit) <= 1e-7);
  CHECK(a->winding == b->winding);
  double ds = std::abs(a->s - b->s);
  const double arc = orbit().total_arc();
  ds = std::min(ds, arc - ds);
  CHECK(std::abs(ds - 0.5 * arc) <= 1e-7);
}
