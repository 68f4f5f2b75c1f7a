// Scratch probe for stable-mesh statistics.
#include <cstdio>

#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

int main() {
  IvdpDrift field(0.5);
  const PeriodicOrbit orbit = find_periodic_orbit(field);
  std::printf("orbit T=%.9f\n", orbit.period);

  StableMeshConfig mc;
  const StableMesh mesh = build_stable_mesh(field, orbit, mc);
  std::printf("strips=%zu segments=%zu\n", mesh.strips.size(),
              mesh.segment_count());

  double min_xy = 1e18, h_worst = 0.0, tmin = 0.0;
  std::size_t npts = 0, short_strips = 0;
  double min_origin = 1e18;
  for (const auto& s : mesh.strips) {
    npts += s.points.size();
    if (s.times.back() > -mc.t_back + 1e-9) ++short_strips;
    tmin = std::min(tmin, s.times.back());
    for (const auto& p : s.points) {
      h_worst = std::max(h_worst, std::abs(hamiltonian(field, p)));
      min_origin = std::min(min_origin, norm(p));
    }
  }
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    const auto& xi = orbit.stable_dirs[k];
    min_xy = std::min(min_xy, std::hypot(xi[0], xi[1]));
  }
  std::printf("points=%zu avg=%.1f short(guard)=%zu h_worst=%.3e\n", npts,
              double(npts) / mesh.strips.size(), short_strips, h_worst);
  std::printf("min |xi_xy|=%.4f min |pt| (origin approach)=%.4f\n", min_xy,
              min_origin);

  // How close do W^u trajectories come to the mesh on a coarse theta grid?
  const LocalUnstableManifold wu = build_unstable_manifold(field);
  std::printf("wu scale=%.6f residual=%.3e\n", wu.scale,
              wu.boundary_residual(field, 256));
  GrowStop stop;
  stop.orbit = &orbit;
  double best[8];
  double bestth[8];
  int nb = 0;
  double global_best = 1e18;
  for (int j = 0; j < 256; ++j) {
    const double th = 2.0 * M_PI * j / 256;
    const auto g = grow_from_k(field, wu, th, stop);
    double dmin = 1e18;
    for (const auto& p : g.traj.node_y) {
      const auto q = mesh.nearest(p);
      if (q.found()) dmin = std::min(dmin, q.dist);
    }
    global_best = std::min(global_best, dmin);
    if (dmin < 0.05 && nb < 8) {
      best[nb] = dmin;
      bestth[nb] = th;
      ++nb;
    }
  }
  std::printf("global best d=%.4e, first coarse hits:\n", global_best);
  for (int i = 0; i < nb; ++i)
    std::printf("  theta=%.4f d=%.4e\n", bestth[i], best[i]);
  return 0;
}
