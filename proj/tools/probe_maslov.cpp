#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/maslov.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

using namespace mpep;

int main() {
  const IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);

  const double thetas[] = {1.636506396233, 2.878461721041, 4.778099049823,
                           6.020054374630, 2.0, 3.5, 4.44};
  for (double th : thetas) {
    MaslovConfig cfg;
    const auto rec = conjugate_points(field, wu, orbit, th, cfg);
    std::printf(
        "theta=%.6f idx=%d n_pts=%zu t_k=%.4f d_k=%.3e t_end=%.4f "
        "exited=%d arrived=%d flagged=%d\n",
        th, rec.maslov_index, rec.points.size(), rec.t_k, rec.d_k, rec.t_end,
        (int)rec.exited, (int)rec.arrived, (int)rec.flagged);
    for (const auto& cp : rec.points)
      std::printf("   zero t=%.6f tau=%.6f mult=%d tang=%d\n", cp.t, cp.tau,
                  cp.multiplicity, (int)cp.tangential);
  }
  return 0;
}
