#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

int main() {
  using namespace mpep;
  IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);
  const double r_in = 0.5 * orbit.r_inside();

  const double th1 = 2.878461721041, th2 = 4.778099049823;
  int exits = 0, returns = 0, undecided = 0;
  double worst_exit_t = 0.0;
  for (int j = 1; j <= 64; ++j) {
    const double th = th1 + (th2 - th1) * j / 65.0;
    const auto p = classify_escape(field, orbit, wu.k_point(th), 60.0, r_in);
    if (p.cls == EscapeClass::exits) {
      ++exits;
      worst_exit_t = std::max(worst_exit_t, p.t_end);
    } else if (p.cls == EscapeClass::returns) {
      ++returns;
      std::printf("  RETURN at th=%.6f t=%.3f\n", th, p.t_end);
    } else {
      ++undecided;
    }
  }
  std::printf("river arc: exits=%d returns=%d undecided=%d worst_t=%.3f\n",
              exits, returns, undecided, worst_exit_t);

  exits = returns = undecided = 0;
  const double ta = 4.778099049823, tb = 6.020054374630;
  for (int j = 1; j <= 16; ++j) {
    const double th = ta + (tb - ta) * j / 17.0;
    const auto p = classify_escape(field, orbit, wu.k_point(th), 60.0, r_in);
    if (p.cls == EscapeClass::exits) {
      ++exits;
      std::printf("  EXIT at th=%.6f t=%.3f\n", th, p.t_end);
    } else if (p.cls == EscapeClass::returns) {
      ++returns;
    } else {
      ++undecided;
    }
  }
  std::printf("outside arc: exits=%d returns=%d undecided=%d\n", exits,
              returns, undecided);

  for (double th : {0.45, 0.1, 3.59, 3.25, 0.0}) {
    const auto p = classify_escape(field, orbit, wu.k_point(th), 60.0, r_in);
    std::printf("th=%.3f cls=%d t_end=%.3f d_gamma=%.3e\n", th, (int)p.cls,
                p.t_end, p.d_gamma);
  }
  return 0;
}
