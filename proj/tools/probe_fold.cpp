#include <cmath>
#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/lift.hpp"
#include "mpep/maslov.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

using namespace mpep;

int main() {
  const IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);

  // Eigenplane transported along the constant trajectory at O: pure scale.
  {
    const Plucker rho0 = unstable_plane(wu);
    std::printf("rho0 = ");
    for (double c : rho0.rho) std::printf("%.6f ", c);
    std::printf("\n  lag defect=%.3e relation=%.3e rho12=%.6f\n",
                rho0.lagrangian_defect(), rho0.relation(), rho0.rho[0]);
    auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
    const auto still = integrate<4>(rhs, Vec4{0, 0, 0, 0}, 0.0, 0.01);
    const auto flow = plucker_flow(field, still, rho0);
    const double scale = std::exp(2.0 * wu.mu1.real() * 0.01);
    double worst = 0.0;
    for (int i = 0; i < 6; ++i)
      worst = std::max(worst,
                       std::abs(flow.final_state()[i] - scale * rho0.rho[i]));
    std::printf("  scale test worst=%.3e (expect ~1e-12)\n", worst);
  }

  // Fold: at an index-1 angle, the theta-derivative of the planar position
  // aligns with the planar flow exactly at the conjugate time.
  {
    const double th = 3.2, h = 1e-5;
    const auto rec = conjugate_points(field, wu, orbit, th);
    const auto recp = conjugate_points(field, wu, orbit, th + h);
    const auto recm = conjugate_points(field, wu, orbit, th - h);
    const double tstar = rec.points.at(0).t;
    for (double dt : {-0.6, -0.3, 0.0, 0.3}) {
      const double t = tstar + dt;
      const Vec<10> sp = recp.path.state_at(t);
      const Vec<10> sm = recm.path.state_at(t);
      const Vec<10> s0 = rec.path.state_at(t);
      const double fdx = (sp[0] - sm[0]) / (2 * h);
      const double fdy = (sp[1] - sm[1]) / (2 * h);
      const auto d = field.derivs(s0[0], s0[1]);
      const double fx = d.f + s0[2], fy = d.g + s0[3];
      const double det = fdx * fy - fdy * fx;
      const double nrm = std::hypot(fdx, fdy) * std::hypot(fx, fy);
      std::printf("  dt=%+.1f det/nrm=%+.3e\n", dt, det / nrm);
    }
  }

  // Vertical tangent via evolved basis vectors at the conjugate time.
  {
    const double th = 3.2;
    const auto rec = conjugate_points(field, wu, orbit, th);
    const double tstar = rec.points.at(0).t;
    auto rhs = [&](double, const Vec<12>& s, Vec<12>& ds) {
      const Vec4 z{s[0], s[1], s[2], s[3]};
      const Vec4 f = lift_rhs(field, z);
      const Mat4 a = lift_linearization(field, z).a;
      for (int i = 0; i < 4; ++i) ds[i] = f[i];
      for (int c = 0; c < 2; ++c)
        for (int i = 0; i < 4; ++i) {
          double acc = 0;
          for (int j = 0; j < 4; ++j) acc += a[i * 4 + j] * s[4 + 4 * c + j];
          ds[4 + 4 * c + i] = acc;
        }
    };
    const double beta = wu.mu1.imag() / wu.mu1.real();
    auto im_norm = [&](double s) {
      return norm(wu.eval(std::polar(s, th + beta * std::log(s))));
    };
    double lo = 1e-9, hi = 1e-2;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (im_norm(mid) < 1e-5 ? lo : hi) = mid;
    }
    const Vec4 z0 = wu.eval(std::polar(lo, th + beta * std::log(lo)));
    const auto& a10 = wu.alpha[LocalUnstableManifold::index(1, 0)];
    Vec<12> y0{};
    for (int i = 0; i < 4; ++i) {
      y0[i] = z0[i];
      y0[4 + i] = a10[i].real();
      y0[8 + i] = a10[i].imag();
    }
    const auto base = integrate<12>(rhs, y0, 0.0, tstar + 0.7);
    for (double dt : {-0.5, 0.0, 0.5}) {
      const Vec<12> s = base.state_at(tstar + dt);
      const double m00 = s[4], m01 = s[8], m10 = s[5], m11 = s[9];
      const double det = m00 * m11 - m01 * m10;
      const double nrm = std::hypot(m00, m10) * std::hypot(m01, m11);
      std::printf("  vert dt=%+.1f detV1/colnorm=%+.3e\n", dt, det / nrm);
    }
  }
  return 0;
}
