#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

int main() {
  using namespace mpep;
  IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };

  auto dip = [&](double th) {
    std::vector<EventSpec<4>> evs{{[&orbit](double, const Vec4& y) {
                                     return orbit.radial_gap(y[0], y[1]);
                                   },
                                   EventDirection::rising, true}};
    IntegratorConfig ic;
    ic.store_dense = false;
    const auto traj = integrate<4>(rhs, wu.k_point(th), 0.0, 40.0, ic, evs);
    double rmin = 1e300, tmin = 0.0, pseen = 0.0;
    for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
      const auto& y = traj.node_y[i];
      const double r = std::hypot(y[0], y[1]);
      if (r < rmin) {
        rmin = r;
        tmin = traj.node_t[i];
        pseen = std::hypot(y[2], y[3]);
      }
    }
    std::printf(
        "th=%.6f crossed=%d t_end=%7.3f rmin=%.4f at t=%.3f |P|=%.3e\n", th,
        traj.first_hit(0) != nullptr, traj.t_final(), rmin, tmin, pseen);
  };

  std::puts("band (inner-dip) samples:");
  for (double th : {3.462966, 3.579866, 3.696767, 0.45}) dip(th);
  std::puts("outside (return) arc samples:");
  for (double th : {4.85, 5.1, 5.34, 5.7, 5.95, 2.2}) dip(th);
  std::puts("plain river samples:");
  for (double th : {0.0, 0.1, 1.0, 3.0, 4.44}) dip(th);
  std::puts("near-heteroclinic return branches:");
  for (double th : {1.636506, 2.878462, 1.6366, 2.8784}) dip(th);
  return 0;
}
