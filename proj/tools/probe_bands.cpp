// Scratch probe: winding structure of exit bands.
#include <cstdio>
#include <cmath>

#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

int main() {
  IvdpDrift field(0.5);
  const PeriodicOrbit orbit = find_periodic_orbit(field);
  const LocalUnstableManifold wu = build_unstable_manifold(field);
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  const double r_ret = 0.5 * orbit.r_inside();

  for (double th : {1.1, 0.1, 2.2, 0.45, 0.577, 1.632}) {
    std::vector<EventSpec<4>> evs;
    evs.push_back({[&](double, const Vec4& y) {
                     return orbit.radial_gap(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    evs.push_back({[&](double, const Vec4& y) {
                     return r_ret - std::hypot(y[0], y[1]);
                   },
                   EventDirection::rising, false});
    const auto traj = integrate<4>(rhs, wu.k_point(th), 0.0, 40.0, {}, evs);
    int entries = 0;
    for (const auto& h : traj.hits)
      if (h.event == 1) ++entries;
    const bool crossed = traj.first_hit(0) != nullptr;
    double dmin = 1e18;
    double tmin = 0.0;
    for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
      const double d = orbit_distance_4d(orbit, traj.node_y[i]);
      if (d < dmin) {
        dmin = d;
        tmin = traj.node_t[i];
      }
    }
    std::printf(
        "theta=%.3f crossed=%d t_end=%.2f disk_entries=%d min_dGamma=%.3e "
        "at t=%.2f\n",
        th, crossed ? 1 : 0, traj.t_final(), entries, dmin, tmin);
  }
  return 0;
}
