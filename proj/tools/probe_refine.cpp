// Scratch probe: refine each exit/return transition and identify its type.
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

  struct Probe {
    bool crossed = false;
    bool returned = false;
    double t_end = 0.0;
    double d_gamma = 1e18;
    double t_close = 0.0;
  };
  auto run = [&](double th, double horizon) {
    std::vector<EventSpec<4>> evs;
    evs.push_back({[&](double, const Vec4& y) {
                     return orbit.radial_gap(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    evs.push_back({[&](double, const Vec4& y) {
                     return r_ret - std::hypot(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    const auto traj =
        integrate<4>(rhs, wu.k_point(th), 0.0, horizon, {}, evs);
    Probe p;
    p.crossed = traj.first_hit(0) != nullptr;
    p.returned = traj.first_hit(1) != nullptr;
    p.t_end = traj.t_final();
    for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
      const double d = orbit_distance_4d(orbit, traj.node_y[i]);
      if (d < p.d_gamma) {
        p.d_gamma = d;
        p.t_close = traj.node_t[i];
      }
    }
    return p;
  };

  const double brackets[4][2] = {{0.294524, 0.319068},
                                 {0.564505, 0.589049},
                                 {1.619884, 1.644427},
                                 {2.871612, 2.896156}};
  for (const auto& b : brackets) {
    double lo = b[0], hi = b[1];
    const bool lo_exit = run(lo, 60.0).crossed;
    for (int it = 0; it < 45; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Probe p = run(mid, 60.0);
      const bool exit_first = p.crossed;
      if (exit_first == lo_exit)
        lo = mid;
      else
        hi = mid;
    }
    const double star = 0.5 * (lo + hi);
    std::printf("bracket [%.6f,%.6f] -> theta*=%.12f (lo_exit=%d)\n", b[0],
                b[1], star, lo_exit ? 1 : 0);
    for (double off : {1e-6, 1e-9}) {
      for (double sgn : {-1.0, 1.0}) {
        const Probe p = run(star + sgn * off, 60.0);
        std::printf(
            "  off=%+.0e: crossed=%d returned=%d t_end=%6.2f dG=%.3e "
            "t_close=%5.2f\n",
            sgn * off, p.crossed ? 1 : 0, p.returned ? 1 : 0, p.t_end,
            p.d_gamma, p.t_close);
      }
    }
  }
  return 0;
}
