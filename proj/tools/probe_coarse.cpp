// Scratch probe: coarse intersection scan with first-approach growth.
#include <cstdio>
#include <cmath>
#include <vector>

#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

int main() {
  IvdpDrift field(0.5);
  const PeriodicOrbit orbit = find_periodic_orbit(field);
  const LocalUnstableManifold wu = build_unstable_manifold(field);
  const StableMesh mesh = build_stable_mesh(field, orbit, {});
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  const double r_ret = 0.5 * orbit.r_inside();

  // Distance profile: first-approach piece of the W^u trajectory vs mesh.
  auto profile = [&](double th) {
    std::vector<EventSpec<4>> evs;
    evs.push_back({[&](double, const Vec4& y) {
                     return orbit.radial_gap(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    evs.push_back({[&](double, const Vec4& y) {
                     return r_ret - std::hypot(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    const auto traj = integrate<4>(rhs, wu.k_point(th), 0.0, 40.0, {}, evs);
    double best = 1e18;
    for (const auto& y : traj.node_y) {
      const auto q = mesh.nearest(y);
      if (q.found() && q.dist < best) best = q.dist;
    }
    return best;
  };

  const int n = 256;
  std::vector<double> m(n);
  for (int j = 0; j < n; ++j) m[j] = profile(2.0 * M_PI * j / n);

  int minima = 0;
  for (int j = 0; j < n; ++j) {
    const double prev = m[(j + n - 1) % n], next = m[(j + 1) % n];
    if (m[j] <= prev && m[j] < next) {
      ++minima;
      // Ternary refinement of the local minimum.
      double a = 2.0 * M_PI * (j - 1) / n, b = 2.0 * M_PI * (j + 1) / n;
      for (int it = 0; it < 30; ++it) {
        const double u = a + (b - a) / 3.0, v = b - (b - a) / 3.0;
        if (profile(u) <= profile(v))
          b = v;
        else
          a = u;
      }
      const double th = 0.5 * (a + b);
      const double d = profile(th);
      if (d < 0.05)
        std::printf("refined minimum theta=%.9f d=%.4e (grid j=%d m=%.3e)\n",
                    th, d, j, m[j]);
    }
  }
  std::printf("grid minima count=%d\n", minima);

  double lo = 1e18, hi = 0.0;
  for (int j = 0; j < n; ++j) {
    lo = std::min(lo, m[j]);
    hi = std::max(hi, m[j]);
  }
  std::printf("grid m range [%.3e, %.3e]\n", lo, hi);
  return 0;
}
