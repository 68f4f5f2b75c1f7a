// Scratch probe: exit/return classification around the boundary circle.
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

  // Even-degree coefficients should vanish by odd symmetry.
  double even_worst = 0.0, odd_max = 0.0;
  for (int d = 1; d <= wu.order; ++d)
    for (int n = 0; n <= d; ++n)
      for (int i = 0; i < 4; ++i) {
        const double m = std::abs(wu.alpha[wu.index(d - n, n)][i]);
        if (d % 2 == 0)
          even_worst = std::max(even_worst, m);
        else
          odd_max = std::max(odd_max, m);
      }
  std::printf("alpha even worst=%.3e odd max=%.3e\n", even_worst, odd_max);

  // Classification: 0 = crossed the orbit (exit), 1 = fell into the inner
  // disk (return), 2 = neither within the horizon.
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  const double r_ret = 0.5 * orbit.r_inside();
  auto classify = [&](double th, double* t_end) {
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
    if (t_end) *t_end = traj.t_final();
    if (traj.first_hit(0)) return 0;
    if (traj.first_hit(1)) return 1;
    return 2;
  };

  const int n = 256;
  std::vector<int> cls(n);
  for (int j = 0; j < n; ++j) cls[j] = classify(2.0 * M_PI * j / n, nullptr);
  int counts[3] = {0, 0, 0};
  for (int j = 0; j < n; ++j) ++counts[cls[j]];
  std::printf("exit=%d return=%d neither=%d\n", counts[0], counts[1],
              counts[2]);
  for (int j = 0; j < n; ++j) {
    const int k = (j + 1) % n;
    if (cls[j] != cls[k])
      std::printf("transition %d->%d between theta=%.6f and %.6f\n", cls[j],
                  cls[k], 2.0 * M_PI * j / n, 2.0 * M_PI * k / n);
  }

  // Node spacing statistics for growth trajectories and mesh strips.
  GrowStop stop;
  stop.orbit = &orbit;
  double worst_gap = 0.0;
  for (int j = 0; j < 16; ++j) {
    const auto g = grow_from_k(field, wu, 2.0 * M_PI * j / 16, stop);
    for (std::size_t i = 1; i < g.traj.node_y.size(); ++i)
      worst_gap = std::max(worst_gap,
                           norm(g.traj.node_y[i] - g.traj.node_y[i - 1]));
  }
  std::printf("wu growth worst node gap=%.4f\n", worst_gap);

  StableMeshConfig mc;
  mc.stride = 64;
  const StableMesh mesh = build_stable_mesh(field, orbit, mc);
  double strip_gap = 0.0;
  for (const auto& s : mesh.strips)
    for (std::size_t i = 1; i < s.points.size(); ++i)
      strip_gap = std::max(strip_gap, norm(s.points[i] - s.points[i - 1]));
  std::printf("strip worst kept-point gap=%.4f\n", strip_gap);
  return 0;
}
