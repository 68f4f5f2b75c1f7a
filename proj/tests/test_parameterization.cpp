#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/lift.hpp"
#include "mpep/parameterization.hpp"

using namespace mpep;
using cd = std::complex<double>;

namespace {

const IvdpDrift& field() {
  static IvdpDrift f(0.5);
  return f;
}

const LocalUnstableManifold& manifold() {
  static LocalUnstableManifold wu = build_unstable_manifold(field());
  return wu;
}

}  // namespace

TEST_CASE("unstable eigenpair matches the analytic values") {
  const auto& wu = manifold();
  // Linearization at the origin has eigenvalues eta +- i sqrt(1 - eta^2)
  // (drift pair) and their mirror images; the lift doubles the spectrum.
  const double eta = 0.5;
  CHECK(wu.mu1.real() == doctest::Approx(eta).epsilon(1e-12));
  CHECK(wu.mu1.imag() ==
        doctest::Approx(std::sqrt(1.0 - eta * eta)).epsilon(1e-12));
  CHECK(wu.mu2 == std::conj(wu.mu1));
  CHECK(wu.scale > 0.0);
}

TEST_CASE("coefficients are conjugate symmetric without being forced") {
  const auto& wu = manifold();
  for (int d = 1; d <= wu.order; ++d) {
    double mag = 0.0;
    for (int n = 0; n <= d; ++n)
      for (int i = 0; i < 4; ++i)
        mag = std::max(mag, std::abs(wu.alpha[wu.index(d - n, n)][i]));
    for (int n = 0; n <= d; ++n) {
      const auto& a = wu.alpha[wu.index(d - n, n)];
      const auto& b = wu.alpha[wu.index(n, d - n)];
      for (int i = 0; i < 4; ++i)
        CHECK(std::abs(a[i] - std::conj(b[i])) <= 1e-12 * std::max(mag, 1e-30));
    }
  }
}

TEST_CASE("boundary points are real up to roundoff") {
  const auto& wu = manifold();
  for (int j = 0; j < 64; ++j) {
    const double th = 2.0 * M_PI * j / 64;
    const cd z1 = std::polar(1.0, th);
    const cd z2 = std::conj(z1);
    std::array<cd, 4> acc{};
    for (int d = 1; d <= wu.order; ++d)
      for (int n = 0; n <= d; ++n) {
        const auto& a = wu.alpha[wu.index(d - n, n)];
        const cd w = std::pow(z1, d - n) * std::pow(z2, n);
        for (int i = 0; i < 4; ++i) acc[i] += a[i] * w;
      }
    for (int i = 0; i < 4; ++i) CHECK(std::abs(acc[i].imag()) <= 1e-12);
  }
}

TEST_CASE("invariance defect meets the pinned tolerance on the boundary") {
  const auto& wu = manifold();
  CHECK(wu.order == 25);
  CHECK(wu.boundary_residual(field(), 512) <= 1e-8);
}

TEST_CASE("residual decreases as the truncation order grows") {
  const auto& wu = manifold();
  double prev = 1e100;
  for (int cap : {5, 10, 15, 20, 25}) {
    const double res = wu.boundary_residual(field(), 256, cap);
    CHECK(res <= prev + 1e-12);
    prev = res;
  }
  CHECK(prev <= 1e-8);
}

TEST_CASE("hamiltonian vanishes on the whole patch") {
  const auto& wu = manifold();
  CHECK(wu.patch_hamiltonian_sup(field(), 8, 128) <= 1e-9);
}

TEST_CASE("series shadows the backward flow from the boundary circle") {
  const auto& wu = manifold();
  auto rhs = [&](double, const Vec4& s, Vec4& ds) {
    ds = lift_rhs(field(), s);
  };
  IntegratorConfig ic;
  ic.rtol = 1e-12;
  ic.atol = 1e-14;
  for (int j = 0; j < 16; ++j) {
    const double th = 2.0 * M_PI * j / 16;
    const auto traj =
        integrate<4>(rhs, wu.k_point(th), 0.0, -10.0, ic);
    REQUIRE(traj.reached_end());
    for (double t : {-1.0, -2.0, -4.0, -7.0, -10.0}) {
      const cd z1 = std::exp(wu.mu1 * t) * std::polar(1.0, th);
      const Vec4 pred = wu.eval(z1);
      const Vec4 got = traj.state_at(t);
      CHECK(norm(pred - got) <= 1e-6);
    }
  }
}

TEST_CASE("fundamental domain: pull back in parameter, flow forward") {
  const auto& wu = manifold();
  auto rhs = [&](double, const Vec4& s, Vec4& ds) {
    ds = lift_rhs(field(), s);
  };
  IntegratorConfig ic;
  ic.rtol = 1e-12;
  ic.atol = 1e-14;
  for (double t : {0.3, 1.0}) {
    for (int j = 0; j < 8; ++j) {
      const double th = 2.0 * M_PI * j / 8;
      const cd z1 = std::exp(-wu.mu1 * t) * std::polar(1.0, th);
      const auto traj = integrate<4>(rhs, wu.eval(z1), 0.0, t, ic);
      REQUIRE(traj.reached_end());
      CHECK(norm(traj.final_state() - wu.k_point(th)) <= 1e-8);
    }
  }
}

TEST_CASE("tangent matches a finite difference of K") {
  const auto& wu = manifold();
  const double h = 1e-6;
  for (double th : {0.0, 1.1, 2.9, 4.4, 6.0}) {
    const Vec4 fd =
        (1.0 / (2.0 * h)) * (wu.k_point(th + h) - wu.k_point(th - h));
    CHECK(norm(wu.k_tangent(th) - fd) <= 1e-6);
  }
}

namespace {

// First-order coefficients of two builds of the same manifold differ by a
// complex factor w; then P2(z) = P1(w z) identically as polynomials.
cd first_order_ratio(const LocalUnstableManifold& a,
                     const LocalUnstableManifold& b) {
  const auto& a10 = a.alpha[a.index(1, 0)];
  const auto& b10 = b.alpha[b.index(1, 0)];
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(b10[i]) > std::abs(b10[k])) k = i;
  return a10[k] / b10[k];
}

void check_same_manifold(const LocalUnstableManifold& a,
                         const LocalUnstableManifold& b, cd w) {
  for (int j = 0; j < 64; ++j) {
    const double th = 2.0 * M_PI * j / 64;
    CHECK(norm(a.k_point(th) - b.eval(w * std::polar(1.0, th))) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("eigenvector phase and scale only shift the parameterization") {
  const auto& wu = manifold();

  SUBCASE("controlled premultiplier gives the prescribed shift") {
    UnstableManifoldConfig cfg;
    cfg.eigvec_premultiplier = 1.37 * std::polar(1.0, 0.4);
    const LocalUnstableManifold other = build_unstable_manifold(field(), cfg);
    const cd w = first_order_ratio(other, wu);
    CHECK(std::abs(std::arg(w) - 0.4) <= 1e-12);
    // The certified scale absorbs the factor 1.37 up to the sampling
    // resolution of the sup norms.
    CHECK(std::abs(std::abs(w) - 1.0) <= 2e-3);
    check_same_manifold(other, wu, w);
  }

  SUBCASE("raw eigenvector phase is a reparameterization too") {
    UnstableManifoldConfig cfg;
    cfg.normalize_phase = false;
    const LocalUnstableManifold other = build_unstable_manifold(field(), cfg);
    const cd w = first_order_ratio(other, wu);
    CHECK(std::abs(std::abs(w) - 1.0) <= 2e-3);
    check_same_manifold(other, wu, w);
  }
}

TEST_CASE("grown trajectories conserve H and cross the orbit boundary") {
  const auto& wu = manifold();
  const PeriodicOrbit orb = find_periodic_orbit(field());
  GrowStop stop;
  stop.orbit = &orb;
  IntegratorConfig ic;
  ic.rtol = 1e-12;
  ic.atol = 1e-14;
  int crossings = 0;
  for (double th : {0.0, 1.57, 3.14, 4.71}) {
    const auto grown = grow_from_k(field(), wu, th, stop, ic);
    CHECK(!grown.blew_up);
    double hmax = 0.0;
    const double t1 = grown.traj.t_final();
    for (int k = 0; k <= 200; ++k) {
      const double t = t1 * k / 200.0;
      hmax = std::max(hmax,
                      std::abs(hamiltonian(field(), grown.traj.state_at(t))));
    }
    CHECK(hmax <= 1e-7);
    if (grown.crossed) {
      ++crossings;
      CHECK(std::abs(orb.radial_gap(grown.cross_state[0],
                                    grown.cross_state[1])) <= 1e-8);
    }
  }
  CHECK(crossings >= 1);
}
