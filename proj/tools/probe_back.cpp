#include <complex>
#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

int main() {
  using namespace mpep;
  IvdpDrift field(0.5);
  const auto wu = build_unstable_manifold(field);
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };

  for (double th : {1.636506396233, 2.878461721041, 0.3, 2.0}) {
    for (double rt : {1e-12, 1e-13}) {
      IntegratorConfig ic;
      ic.rtol = rt;
      ic.atol = rt * 1e-2;
      ic.store_dense = true;
      const auto traj = integrate<4>(rhs, wu.k_point(th), 0.0, -30.0, ic);
      std::printf("th=%.4f rtol=%.0e:", th, rt);
      double dmin = 1e300, tmin = 0;
      for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
        const double d = norm(traj.node_y[i]);
        if (d < dmin) {
          dmin = d;
          tmin = traj.node_t[i];
        }
      }
      for (double t : {-10.0, -15.0, -20.0, -25.0, -30.0}) {
        const double d = norm(traj.state_at(t));
        const std::complex<double> z =
            std::exp(wu.mu1 * t) * std::polar(1.0, th);
        const double pn = norm(wu.eval(z));
        std::printf("  t=%.0f d=%.2e p=%.2e", t, d, pn);
      }
      std::printf("  min=%.2e@t=%.1f\n", dmin, tmin);
    }
  }
  return 0;
}
