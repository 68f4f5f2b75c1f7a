#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mpep/drift.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
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

const StableMesh& mesh() {
  static StableMesh m = build_stable_mesh(field(), orbit());
  return m;
}

}  // namespace

TEST_CASE("stable directions have a usable planar part") {
  const auto& o = orbit();
  REQUIRE(o.stable_dirs.size() == o.size());
  double min_xy = 1e300;
  for (const Vec4& xi : o.stable_dirs) {
    CHECK(norm(xi) == doctest::Approx(1.0).epsilon(1e-12));
    min_xy = std::min(min_xy, std::hypot(xi[0], xi[1]));
  }
  CHECK(min_xy > 0.3);
}

TEST_CASE("seeds sit on H = 0 just inside the orbit") {
  const auto& o = orbit();
  const auto& m = mesh();
  REQUIRE(m.strips.size() == o.size());
  for (std::size_t k = 0; k < m.strips.size(); ++k) {
    const auto& s = m.strips[k];
    CHECK(s.seed_index == k);
    CHECK(s.tau == doctest::Approx(o.tau[k]));
    CHECK(std::abs(hamiltonian(field(), s.seed)) <= 1e-12);
    const Vec4 gamma{o.points[k][0], o.points[k][1], 0.0, 0.0};
    const double off = norm(s.seed - gamma);
    CHECK(off >= 0.5e-5);
    CHECK(off <= 2.0e-5);
    CHECK(o.radial_gap(s.seed[0], s.seed[1]) < 0.0);
  }
}

TEST_CASE("strips stay on the energy level over the whole backward span") {
  const auto& m = mesh();
  double h_sup = 0.0;
  for (const auto& s : m.strips) {
    REQUIRE(s.points.size() == s.times.size());
    REQUIRE(s.points.size() >= 2);
    CHECK(s.times.front() == 0.0);
    CHECK(s.times.back() == doctest::Approx(-14.0).epsilon(1e-9));
    CHECK(norm(s.points.front() - s.seed) <= 1e-15);
    for (const Vec4& p : s.points)
      h_sup = std::max(h_sup, std::abs(hamiltonian(field(), p)));
  }
  CHECK(h_sup <= 1e-10);
}

TEST_CASE("decimation keeps chords at or above the configured length") {
  const auto& m = mesh();
  const auto& s = m.strips[123];
  for (std::size_t i = 0; i + 2 < s.points.size(); ++i) {
    CHECK(norm(s.points[i + 1] - s.points[i]) >= 0.05 - 1e-12);
    CHECK(s.times[i + 1] < s.times[i]);
  }
}

TEST_CASE("strip points flow forward onto the orbit") {
  const auto& o = orbit();
  const auto& m = mesh();
  auto rhs = [&](double, const Vec4& s, Vec4& ds) {
    ds = lift_rhs(field(), s);
  };
  const auto& s = m.strips[37];
  std::size_t idx = 0;
  while (idx + 1 < s.times.size() && s.times[idx] > -5.0) ++idx;
  const double t_node = s.times[idx];
  IntegratorConfig ic;
  ic.store_dense = false;
  const auto fwd = integrate<4>(rhs, s.points[idx], t_node, 3.0, ic);
  REQUIRE(fwd.reached_end());
  CHECK(orbit_distance_4d(o, fwd.final_state()) <= 1e-5);
}

TEST_CASE("nearest returns stored points exactly") {
  const auto& m = mesh();
  const auto& s = m.strips[512];
  const Vec4 p = s.points[s.points.size() / 2];
  const auto q = m.nearest(p);
  REQUIRE(q.found());
  CHECK(q.dist <= 1e-12);
  CHECK(q.strip == 512);
  CHECK(norm(q.closest - p) <= 1e-12);
}

TEST_CASE("nearest resolves small offsets and rejects far points") {
  const auto& m = mesh();
  const Vec4 p = m.strips[100].points[4];
  Vec4 off = p;
  off[2] += 0.004;
  const auto q = m.nearest(off);
  REQUIRE(q.found());
  CHECK(q.dist <= 0.004 + 1e-12);
  CHECK(q.dist >= 1e-5);

  CHECK(m.reach() == doctest::Approx(0.1));
  const auto far = m.nearest(Vec4{10.0, 10.0, 0.0, 0.0});
  CHECK(!far.found());
}

TEST_CASE("4d orbit distance separates planar and fiber offsets") {
  const auto& o = orbit();
  const Vec2 g = o.points[17];
  CHECK(orbit_distance_4d(o, Vec4{g[0], g[1], 0.0, 0.0}) <= 1e-9);
  CHECK(orbit_distance_4d(o, Vec4{g[0], g[1], 0.3, 0.4}) ==
        doctest::Approx(0.5).epsilon(1e-9));
}
