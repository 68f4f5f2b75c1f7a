#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/stable_mesh.hpp"

int main() {
  using namespace mpep;
  IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);
  const auto mesh = build_stable_mesh(field, orbit);
  std::printf("mesh strips=%zu segs=%zu\n", mesh.strips.size(),
              mesh.segment_count());

  HeteroclinicConfig cfg;
  const auto hets = find_heteroclinics(field, wu, mesh, orbit, cfg);
  std::printf("found %zu heteroclinics\n", hets.size());
  for (const auto& h : hets) {
    std::printf(
        "theta=%.12f side=%+.0f d_o=%.3e hand=%.3e d_gamma=%.3e t_close=%.3f cert=%d "
        "trans=%.6f  wit: d=%.3e t=%.3f tau=%.4f\n",
        h.theta, h.exit_side, h.d_o, h.d_handoff, h.d_gamma, h.t_close, (int)h.certified,
        h.transversality, h.witness.dist, h.witness.t_wu, h.witness.strip_tau);
    const auto rep = transversality_check(field, wu, mesh, orbit, h, 0.0, cfg);
    std::printf("  flow_angle=%.3e angle=%.6f omega_u=%.3e omega_s=%.3e\n",
                rep.flow_angle, rep.angle, rep.omega_u, rep.omega_s);
    for (double off : {-0.05, -0.02, 0.02, 0.05}) {
      const auto r2 = transversality_check(field, wu, mesh, orbit, h, off, cfg);
      std::printf("  off=%+.2f angle=%.6f flow=%.3e\n", off, r2.angle,
                  r2.flow_angle);
    }
  }

  const auto torus = build_exit_torus(field, orbit);
  std::printf("torus samples=%zu r0=%.4f\n", torus.base.size(),
              torus.radius[0]);
  const auto sec = torus_section(field, wu, 1.0, 64);
  std::printf("section: toroidal=%.6f poloidal=%.6f\n", sec.toroidal_winding,
              sec.poloidal_winding);
  return 0;
}
