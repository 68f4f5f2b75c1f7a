#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
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

const StableMesh& mesh() {
  static StableMesh m = build_stable_mesh(field(), orbit());
  return m;
}

const std::vector<Heteroclinic>& hets() {
  static std::vector<Heteroclinic> h =
      find_heteroclinics(field(), wu(), mesh(), orbit());
  return h;
}

double classify_radius() {
  return HeteroclinicConfig{}.classify_radius_factor * orbit().r_inside();
}

}  // namespace

TEST_CASE("four certified connections in mirror pairs") {
  const auto& h = hets();
  REQUIRE(h.size() == 4);
  CHECK(h[0].theta == doctest::Approx(1.636506396233).epsilon(1e-9));
  CHECK(h[1].theta == doctest::Approx(2.878461721041).epsilon(1e-9));
  CHECK(std::abs(h[2].theta - h[0].theta - M_PI) <= 1e-10);
  CHECK(std::abs(h[3].theta - h[1].theta - M_PI) <= 1e-10);
  for (const auto& het : h) {
    CHECK(het.certified);
    CHECK(het.d_o <= 1e-6);
    CHECK(het.d_handoff <= 1e-8);
    CHECK(het.d_gamma <= 1e-4);
    CHECK(het.t_close > 10.0);
    CHECK(het.t_close < 16.0);
    CHECK(het.witness.dist < 1e-2);
    CHECK(het.witness.witness.found());
  }
  CHECK(h[0].exit_side == -1.0);
  CHECK(h[1].exit_side == 1.0);
  CHECK(h[2].exit_side == -1.0);
  CHECK(h[3].exit_side == 1.0);
}

TEST_CASE("mirror map re-refinement reproduces the partner angles") {
  const auto& h = hets();
  for (int i : {0, 1}) {
    const auto partner = refine_heteroclinic(field(), wu(), orbit(),
                                             wrap_2pi(h[i].theta + M_PI));
    CHECK(std::abs(partner.theta - h[i + 2].theta) <= 1e-10);
    CHECK(partner.certified);
  }
}

TEST_CASE("refinement is deterministic") {
  const auto a = refine_heteroclinic(field(), wu(), orbit(), 1.6365);
  const auto b = refine_heteroclinic(field(), wu(), orbit(), 1.6365);
  CHECK(a.theta == b.theta);
  CHECK(a.d_o == b.d_o);
  CHECK(a.d_gamma == b.d_gamma);
}

TEST_CASE("connections are far from the grazing tangency angles") {
  for (const auto& het : hets())
    for (double g : {0.299699, 0.573586, 0.299699 + M_PI, 0.573586 + M_PI})
      CHECK(std::abs(angle_diff(het.theta, g)) > 0.3);
}

TEST_CASE("tangent planes are transverse inside the energy level") {
  const auto& h = hets();
  CHECK(h[0].transversality == doctest::Approx(0.290156).epsilon(0.03));
  CHECK(h[1].transversality == doctest::Approx(1.049351).epsilon(0.03));
  CHECK(h[2].transversality == doctest::Approx(h[0].transversality).epsilon(1e-4));
  CHECK(h[3].transversality == doctest::Approx(h[1].transversality).epsilon(1e-4));
  for (int i : {0, 1}) {
    const auto rep = transversality_check(field(), wu(), mesh(), orbit(), h[i]);
    CHECK(rep.angle > 1e-3);
    CHECK(rep.flow_angle <= 1e-3);
    CHECK(std::abs(rep.omega_u) <= 1e-9);
    CHECK(std::abs(rep.omega_s) <= 1e-7);
    for (double off : {-0.02, 0.02}) {
      const auto shifted =
          transversality_check(field(), wu(), mesh(), orbit(), h[i], off);
      CHECK(shifted.angle == doctest::Approx(rep.angle).epsilon(0.10));
      CHECK(shifted.flow_angle <= 1e-3);
    }
  }
}

TEST_CASE("heteroclinic angles partition the parameterizing circle") {
  const auto& h = hets();
  const double r_in = classify_radius();
  const double a = h[1].theta, b = h[2].theta;
  for (int j = 1; j <= 64; ++j) {
    const double th = a + (b - a) * j / 65.0;
    const auto p =
        classify_escape(field(), orbit(), wu().k_point(th), 60.0, r_in);
    CHECK(p.cls == EscapeClass::exits);
    CHECK(p.t_end < 40.0);
  }
  const double c = h[2].theta, d = h[3].theta;
  for (int j = 1; j <= 16; ++j) {
    const double th = c + (d - c) * j / 17.0;
    const auto p =
        classify_escape(field(), orbit(), wu().k_point(th), 60.0, r_in);
    CHECK(p.cls == EscapeClass::returns);
  }
}

TEST_CASE("near-connection trajectories shadow the orbit without crossing") {
  const auto& h = hets();
  const double r_in = classify_radius();
  for (const auto& het : h) {
    const auto p = classify_escape(field(), orbit(), wu().k_point(het.theta),
                                   60.0, r_in);
    CHECK(p.d_gamma <= 1e-3);
    CHECK(p.t_end >= het.t_close);
  }
}

TEST_CASE("exit torus lies on the orbit at zero energy") {
  const auto torus = build_exit_torus(field(), orbit());
  REQUIRE(torus.base.size() == orbit().size());
  double h_sup = 0.0, mark_gap = 0.0;
  for (std::size_t k = 0; k < torus.base.size(); ++k) {
    CHECK(torus.base[k][0] == orbit().points[k][0]);
    CHECK(torus.base[k][1] == orbit().points[k][1]);
    mark_gap = std::max(
        mark_gap, std::abs(std::hypot(torus.center[k][0], torus.center[k][1]) -
                           torus.radius[k]));
    for (double beta : {0.0, 1.0, 2.5, 4.0, 5.5}) {
      const Vec4 pt = torus.point(k, beta);
      h_sup = std::max(h_sup, std::abs(hamiltonian(field(), pt)));
    }
  }
  CHECK(h_sup <= 1e-9);
  CHECK(mark_gap <= 1e-12);
}

TEST_CASE("intermediate torus section closes toroidally with no poloidal wrap") {
  const auto sec = torus_section(field(), wu(), 1.0, 64);
  REQUIRE(sec.theta.size() == 65);
  CHECK(std::abs(std::abs(sec.toroidal_winding) - 1.0) <= 1e-6);
  CHECK(std::abs(sec.poloidal_winding) <= 1e-6);
}
