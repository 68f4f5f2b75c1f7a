#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"

using namespace mpep;

namespace {

const PeriodicOrbit& orbit() {
  static const PeriodicOrbit o = [] {
    IvdpDrift fld(0.5);
    return find_periodic_orbit(fld);
  }();
  return o;
}

// Independent point-in-polygon test by winding number.
bool winding_inside(const std::vector<Vec2>& poly, double x, double y) {
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % n];
    total += std::atan2((a[0] - x) * (b[1] - y) - (a[1] - y) * (b[0] - x),
                        (a[0] - x) * (b[0] - x) + (a[1] - y) * (b[1] - y));
  }
  return std::abs(total) > M_PI;
}

}  // namespace

TEST_CASE("orbit period and amplitude") {
  const PeriodicOrbit& o = orbit();
  CHECK(o.period == doctest::Approx(6.663).epsilon(1e-3));
  double max_x = 0.0;
  for (const Vec2& p : o.points) max_x = std::max(max_x, std::abs(p[0]));
  CHECK(max_x == doctest::Approx(2.0086).epsilon(1e-3));
  CHECK(o.size() == 1024);
  CHECK(o.tau.front() == 0.0);
  CHECK(o.tau.back() < o.period);
}

TEST_CASE("orbit closure and independent return-time oracle") {
  const PeriodicOrbit& o = orbit();
  IvdpDrift fld(0.5);
  auto rhs = [&](double, const Vec2& y, Vec2& dy) {
    dy = fld.value(y[0], y[1]);
  };
  IntegratorConfig cfg;
  cfg.rtol = 1e-12;
  cfg.atol = 1e-14;
  cfg.store_dense = false;
  std::vector<EventSpec<2>> evs(1);
  evs[0].value = [](double, const Vec2& y) { return y[1]; };
  evs[0].direction = EventDirection::falling;
  auto traj = integrate<2>(rhs, o.points[0], 0.0, 3.0 * o.period, cfg, evs);
  std::vector<double> times;
  for (const auto& hit : traj.hits)
    if (hit.y[0] > 0.0 && hit.t > 1e-6) times.push_back(hit.t);
  REQUIRE(times.size() >= 2);
  CHECK(times[0] == doctest::Approx(o.period).epsilon(1e-9));
  CHECK(times[1] - times[0] == doctest::Approx(o.period).epsilon(1e-9));
}

TEST_CASE("lift monodromy multiplier structure") {
  const PeriodicOrbit& o = orbit();
  const auto& m = o.lift_multipliers;  // moduli ascending
  CHECK(m[3] > 100.0);
  CHECK(std::abs(m[1] - 1.0) < 1e-5);
  CHECK(std::abs(m[2] - 1.0) < 1e-5);
  CHECK(std::abs(m[0] * m[3] - 1.0) < 1e-6);

  // The repelling multiplier equals exp of the divergence loop integral.
  CHECK(std::log(o.multiplier) ==
        doctest::Approx(o.log_multiplier).epsilon(1e-6));
}

TEST_CASE("stable directions of the lift monodromy") {
  const PeriodicOrbit& o = orbit();
  const Vec4& xi0 = o.stable_dirs[0];
  CHECK(norm(xi0) == doctest::Approx(1.0).epsilon(1e-12));

  // Monodromy eigenvector with eigenvalue 1/lambda.
  const Vec4 mx = matvec(o.monodromy, xi0);
  const double inv_lambda = 1.0 / o.multiplier;
  for (int i = 0; i < 4; ++i)
    CHECK(mx[i] == doctest::Approx(inv_lambda * xi0[i])
                       .scale(inv_lambda)
                       .epsilon(1e-5));

  // Every transported direction is a unit vector leaving the base plane.
  for (const Vec4& xi : o.stable_dirs) {
    CHECK(norm(xi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::hypot(xi[2], xi[3]) > 1e-6);
  }
}

TEST_CASE("polygon geometry and classification") {
  const PeriodicOrbit& o = orbit();
  CHECK(o.contains(0.0, 0.0));
  CHECK_FALSE(o.contains(3.0, 0.0));
  CHECK_FALSE(o.contains(0.0, -2.9));
  CHECK(o.r_inside() > 0.5);
  CHECK(o.r_inside() < o.r_outside());
  CHECK(o.r_outside() < 3.0);

  for (std::size_t k = 0; k < o.size(); k += 97) {
    const Vec2& p = o.points[k];
    CHECK(std::abs(o.radial_gap(p[0], p[1])) < 1e-12);
    const auto proj = o.project(p[0], p[1]);
    CHECK(proj.dist < 1e-12);
  }

  // Arc-position round trip.
  for (double s : {0.0, 1.3, 5.2, 9.9, 12.6}) {
    const Vec2 p = o.point_at_arc(s);
    const auto proj = o.project(p[0], p[1]);
    CHECK(proj.dist < 1e-12);
    const double total = o.total_arc();
    double ds = std::fmod(std::abs(proj.s - std::fmod(s, total)), total);
    ds = std::min(ds, total - ds);
    CHECK(ds < 1e-9);
  }
}

TEST_CASE("classifier agrees with winding-number test away from boundary") {
  const PeriodicOrbit& o = orbit();
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::size_t tested = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen), y = u(gen);
    if (o.project(x, y).dist <= 1e-9) continue;
    ++tested;
    CHECK(o.contains(x, y) == winding_inside(o.points, x, y));
  }
  CHECK(tested > 9900);
}
