#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "mpep/drift.hpp"
#include "mpep/lift.hpp"
#include "mpep/maslov.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

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

constexpr double kTheta1A = 1.636506396233;  // index-0 pair
constexpr double kTheta1B = 4.778099049823;
constexpr double kTheta2A = 2.878461721041;  // index-1 pair
constexpr double kTheta2B = 6.020054374630;

// State plus two tangent vectors pushed by the lift linearization.
void basis_rhs(const DriftField& f, const Vec<12>& s, Vec<12>& ds) {
  const Vec4 z{s[0], s[1], s[2], s[3]};
  const Vec4 v = lift_rhs(f, z);
  const Mat4 a = lift_linearization(f, z).a;
  for (int i = 0; i < 4; ++i) ds[i] = v[i];
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) acc += a[i * 4 + j] * s[4 + 4 * c + j];
      ds[4 + 4 * c + i] = acc;
    }
}

Trajectory<12> basis_trajectory(const Vec4& z0, double t1) {
  const auto& a10 = wu().alpha[LocalUnstableManifold::index(1, 0)];
  Vec<12> y0{};
  for (int i = 0; i < 4; ++i) {
    y0[i] = z0[i];
    y0[4 + i] = a10[i].real();
    y0[8 + i] = a10[i].imag();
  }
  auto rhs = [&](double, const Vec<12>& s, Vec<12>& ds) {
    basis_rhs(field(), s, ds);
  };
  return integrate<12>(rhs, y0, 0.0, t1);
}

Plucker basis_plucker(const Vec<12>& s) {
  return plucker_from_basis({s[4], s[5], s[6], s[7]},
                            {s[8], s[9], s[10], s[11]});
}

Vec<6> normalized6(Vec<6> r) {
  const double n = norm(r);
  for (double& c : r) c /= n;
  return r;
}

}  // namespace

TEST_CASE("plucker coordinates from a basis") {
  const auto p = plucker_from_basis({1, 0, 0, 0}, {0, 1, 0, 0});
  CHECK(p.rho[0] == 1.0);
  for (int i = 1; i < 6; ++i) CHECK(p.rho[i] == 0.0);

  const auto q = plucker_from_basis({1, 2, 3, 4}, {5, 6, 7, 8});
  const Vec<6> expect{-4, -8, -12, -4, -8, -4};
  for (int i = 0; i < 6; ++i) CHECK(q.rho[i] == doctest::Approx(expect[i]));
  CHECK(std::abs(q.relation()) <= 1e-12);
  CHECK(q.lagrangian_defect() == doctest::Approx(-16.0));

  CHECK_THROWS_AS(plucker_from_basis({1, 2, 3, 4}, {2, 4, 6, 8}),
                  std::invalid_argument);
}

TEST_CASE("unstable eigenplane is Lagrangian and decomposable") {
  const Plucker rho0 = unstable_plane(wu());
  CHECK(std::abs(rho0.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(rho0.lagrangian_defect()) <= 1e-12);
  CHECK(std::abs(rho0.relation()) <= 1e-12);
  CHECK(rho0.rho[0] > 0.1);

  CHECK_THROWS_AS(unstable_plane_at(wu(), Vec4{1, 0, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("eigenplane transport at the origin is a pure scale") {
  const Plucker rho0 = unstable_plane(wu());
  auto rhs = [&](double, const Vec4& s, Vec4& ds) {
    ds = lift_rhs(field(), s);
  };
  const auto still = integrate<4>(rhs, Vec4{0, 0, 0, 0}, 0.0, 0.01);
  const auto flow = plucker_flow(field(), still, rho0);
  const double scale = std::exp(2.0 * wu().mu1.real() * 0.01);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(flow.final_state()[i] - scale * rho0.rho[i]) <= 1e-12);
}

TEST_CASE("wedge flow matches basis determinants along trajectories") {
  for (double theta : {3.0, 4.3}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    const auto& y0 = rec.path.node_y.front();
    const Vec4 z0{y0[0], y0[1], y0[2], y0[3]};
    const double t_cmp = rec.t_end - 0.5;

    auto rhs = [&](double, const Vec4& s, Vec4& ds) {
      ds = lift_rhs(field(), s);
    };
    const auto traj = integrate<4>(rhs, z0, 0.0, t_cmp);
    const auto flow = plucker_flow(field(), traj, unstable_plane(wu()));
    const auto basis = basis_trajectory(z0, t_cmp);

    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const double t = frac * t_cmp;
      Vec<6> rf, rj;
      const auto sf = flow.state_at(t);
      const auto sj = rec.path.state_at(t);
      for (int i = 0; i < 6; ++i) {
        rf[i] = sf[i];
        rj[i] = sj[4 + i];
      }
      const Vec<6> rb = normalized6(basis_plucker(basis.state_at(t)).rho);
      CHECK(norm_inf(normalized6(rf) - rb) <= 1e-6);
      CHECK(norm_inf(normalized6(rj) - rb) <= 1e-8);
    }

    for (const auto& y : flow.node_y) {
      Plucker p;
      for (int i = 0; i < 6; ++i) p.rho[i] = y[i];
      CHECK(std::abs(p.lagrangian_defect()) <= 1e-7 * p.norm());
      CHECK(std::abs(p.relation()) <= 1e-7 * p.norm() * p.norm());
    }
  }
}

TEST_CASE("joint tracking conserves energy and stays Lagrangian") {
  for (double theta : {kTheta2A, 3.2}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    CHECK(rec.d_k <= 1e-8);
    CHECK(rec.t_k > 20.0);
    CHECK(rec.t_k < 25.0);
    CHECK(rec.t_end > rec.t_k);
    CHECK(rec.exited != rec.arrived);
    for (std::size_t i = 0; i < rec.path.node_y.size(); ++i) {
      const auto& y = rec.path.node_y[i];
      CHECK(std::abs(hamiltonian(field(), {y[0], y[1], y[2], y[3]})) <= 1e-7);
      Plucker p;
      for (int k = 0; k < 6; ++k) p.rho[k] = y[4 + k];
      CHECK(std::abs(p.lagrangian_defect()) <= 1e-7 * p.norm());
    }
  }
}

TEST_CASE("heteroclinic lifts carry indices 0 and 1") {
  for (double theta : {kTheta1A, kTheta1B}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    CHECK(rec.maslov_index == 0);
    CHECK(rec.points.empty());
    CHECK(rec.arrived);
    CHECK_FALSE(rec.flagged);
  }
  double tau_a = 0.0, tau_b = 0.0;
  for (double theta : {kTheta2A, kTheta2B}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    CHECK(rec.maslov_index == 1);
    REQUIRE(rec.points.size() == 1);
    CHECK(rec.points[0].multiplicity == 1);
    CHECK_FALSE(rec.points[0].tangential);
    CHECK_FALSE(rec.flagged);
    (theta == kTheta2A ? tau_a : tau_b) = rec.points[0].tau;
  }
  CHECK(tau_a == doctest::Approx(3.649834704).epsilon(1e-5));
  CHECK(std::abs(tau_a - tau_b) <= 1e-6);
}

TEST_CASE("index and zero time stable under tolerance halving") {
  const auto base = conjugate_points(field(), wu(), orbit(), kTheta2A);

  MaslovConfig tight;
  tight.integ.rtol = 5e-11;
  tight.integ.atol = 5e-13;
  const auto fine = conjugate_points(field(), wu(), orbit(), kTheta2A, tight);

  MaslovConfig deep;
  deep.inner_distance = 5e-6;
  const auto inner = conjugate_points(field(), wu(), orbit(), kTheta2A, deep);

  CHECK(base.maslov_index == 1);
  CHECK(fine.maslov_index == 1);
  CHECK(inner.maslov_index == 1);
  CHECK(std::abs(fine.points[0].tau - base.points[0].tau) <= 1e-6);
  CHECK(std::abs(inner.points[0].tau - base.points[0].tau) <= 1e-6);
  CHECK(fine.d_k <= 1e-8);
  CHECK(inner.d_k <= 1e-8);
}

TEST_CASE("mirror angles share their conjugate structure") {
  const double theta = 3.2;
  const auto a = conjugate_points(field(), wu(), orbit(), theta);
  const auto b = conjugate_points(field(), wu(), orbit(), theta + M_PI - 2 * M_PI);
  CHECK(a.maslov_index == b.maslov_index);
  REQUIRE(a.points.size() == b.points.size());
  CHECK(std::abs(a.points[0].tau - b.points[0].tau) <= 1e-7);
  CHECK(norm(a.end_state + b.end_state) <= 1e-7);
}

TEST_CASE("fold tangency at the conjugate time") {
  const double theta = 3.2, h = 1e-5;
  const auto rec = conjugate_points(field(), wu(), orbit(), theta);
  const auto recp = conjugate_points(field(), wu(), orbit(), theta + h);
  const auto recm = conjugate_points(field(), wu(), orbit(), theta - h);
  REQUIRE(rec.points.size() == 1);
  const double tstar = rec.points[0].t;

  auto alignment = [&](double t) {
    const auto sp = recp.path.state_at(t);
    const auto sm = recm.path.state_at(t);
    const auto s0 = rec.path.state_at(t);
    const double fdx = (sp[0] - sm[0]) / (2 * h);
    const double fdy = (sp[1] - sm[1]) / (2 * h);
    const auto d = field().derivs(s0[0], s0[1]);
    const double vx = d.f + s0[2], vy = d.g + s0[3];
    return (fdx * vy - fdy * vx) / (std::hypot(fdx, fdy) * std::hypot(vx, vy));
  };
  CHECK(std::abs(alignment(tstar)) <= 1e-6);
  CHECK(std::abs(alignment(tstar - 0.3)) >= 1e-3);
  CHECK(std::abs(alignment(tstar + 0.3)) >= 1e-3);
}

TEST_CASE("plane turns vertical exactly at the conjugate time") {
  const double theta = 3.2;
  const auto rec = conjugate_points(field(), wu(), orbit(), theta);
  REQUIRE(rec.points.size() == 1);
  const double tstar = rec.points[0].t;

  const auto& y0 = rec.path.node_y.front();
  const auto basis =
      basis_trajectory({y0[0], y0[1], y0[2], y0[3]}, tstar + 0.7);
  auto v1_defect = [&](double t) {
    const auto s = basis.state_at(t);
    const double det = s[4] * s[9] - s[8] * s[5];
    return det / (std::hypot(s[4], s[5]) * std::hypot(s[8], s[9]));
  };
  CHECK(std::abs(v1_defect(tstar)) <= 1e-6);
  CHECK(std::abs(v1_defect(tstar - 0.5)) >= 1e-2);
  CHECK(std::abs(v1_defect(tstar + 0.5)) >= 1e-2);
}

TEST_CASE("conjugate points sit inside the 0.32 collar") {
  for (double theta : {2.95, 3.2, 3.5}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    CHECK(rec.maslov_index >= 1);
    for (const auto& cp : rec.points) {
      const auto s = rec.path.state_at(cp.t);
      CHECK(orbit().project(s[0], s[1]).dist <= 0.32);
    }
  }
  for (double theta : {3.7, 4.0, 4.3, 4.6, 4.77}) {
    CAPTURE(theta);
    const auto rec = conjugate_points(field(), wu(), orbit(), theta);
    CHECK(rec.maslov_index == 0);
    CHECK(rec.points.empty());
    CHECK(rec.exited);
  }
}

TEST_CASE("fall-back angles cycle before re-exiting") {
  const auto rec = conjugate_points(field(), wu(), orbit(), 2.0);
  CHECK(rec.exited);
  CHECK(rec.t_end - rec.t_k > 50.0);
  CHECK(rec.maslov_index >= 5);
}
