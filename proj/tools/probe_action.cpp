#include <cmath>
#include <cstdio>
#include <vector>

#include "mpep/action.hpp"
#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/river.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

int main() {
  const IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);
  const auto hets = find_heteroclinics(field, wu, build_stable_mesh(field, orbit), orbit);
  const auto river = find_river(field, wu, orbit, hets);
  printf("river: theta1=%.12f theta2=%.12f\n", river.theta1, river.theta2);
  fflush(stdout);

  ActionConfig acfg;

  // --- single leg + oracles -------------------------------------------
  for (double th : {4.0, 3.8, 4.6}) {
    const ActionLeg leg = action_leg(field, wu, orbit, th, acfg);
    printf("leg th=%.3f t_start=%.6f t_end=%.6f S=%.12e C=%.12e tail=%.3e "
           "angle=%.4f winds=%.3f maxH=%.2e exited=%d\n",
           th, leg.t_start, leg.t_end, leg.s_action, leg.om_c, leg.s_tail,
           leg.angle_swept, leg.angle_swept / (2 * M_PI), leg.h_drift,
           leg.exited);

    // 6D quadrature-in-state oracle at tight tolerance.
    auto rhs6 = [&](double, const Vec<6>& y, Vec<6>& dy) {
      const Vec4 z{y[0], y[1], y[2], y[3]};
      const Vec4 f = lift_rhs(field, z);
      for (int i = 0; i < 4; ++i) dy[i] = f[i];
      dy[4] = 0.5 * (z[2] * z[2] + z[3] * z[3]);
      dy[5] = field.divergence(z[0], z[1]);
    };
    const Vec4 z0 = wu.inner_point(th, acfg.inner_distance);
    Vec<6> y0{};
    for (int i = 0; i < 4; ++i) y0[i] = z0[i];
    std::vector<EventSpec<6>> evs;
    evs.push_back({[&](double, const Vec<6>& y) {
                     return std::hypot(y[0], y[1]) - acfg.r0;
                   },
                   EventDirection::rising, false});
    evs.push_back({[&](double, const Vec<6>& y) {
                     return orbit.radial_gap(y[0], y[1]);
                   },
                   EventDirection::rising, true});
    IntegratorConfig ic;
    ic.rtol = 1e-12;
    ic.atol = 1e-14;
    const auto tr = integrate<6>(rhs6, y0, 0.0, 200.0, ic, evs);
    const auto* hit = tr.first_hit(0);
    const Vec<6> at_start = tr.state_at(hit->t);
    const double S6 = tr.final_state()[4] - at_start[4];
    const double C6 = tr.final_state()[5] - at_start[5];
    printf("  oracle6 S=%.12e C=%.12e relS=%.2e relC=%.2e dt_start=%.2e "
           "dt_end=%.2e\n",
           S6, C6, std::abs(S6 - leg.s_action) / std::abs(S6),
           std::abs(C6 - leg.om_c) / std::abs(C6),
           std::abs(hit->t - leg.t_start), std::abs(tr.t_final() - leg.t_end));

    // trapezoid on 1e4 dense samples of the leg itself
    const int n = 10000;
    double st = 0.0, ct = 0.0;
    const double h = (leg.t_end - leg.t_start) / n;
    for (int i = 0; i <= n; ++i) {
      const Vec4 z = leg.path.state_at(leg.t_start + h * i);
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      st += w * 0.5 * (z[2] * z[2] + z[3] * z[3]);
      ct += w * field.divergence(z[0], z[1]);
    }
    st *= h;
    ct *= h;
    printf("  trap1e4 S=%.12e relS=%.2e  C rel=%.2e\n", st,
           std::abs(st - leg.s_action) / std::abs(st),
           std::abs(ct - leg.om_c) / std::abs(ct));

    // om_correction guard + r0 sensitivity
    const double c_half = om_correction(field, leg.path, leg.t_start,
                                        leg.t_end, acfg.r0);
    ActionConfig half = acfg;
    half.r0 = 0.05;
    const ActionLeg leg2 = action_leg(field, wu, orbit, th, half);
    printf("  r0=0.05: C=%.12e  C(r0)-C(r0/2)=%.10f  (guard ok=%d)\n",
           leg2.om_c, leg.om_c - leg2.om_c, c_half == leg.om_c);
    fflush(stdout);
  }

  // --- profile over the river -----------------------------------------
  const auto grid = profile_grid(river);
  printf("grid n=%zu first=%.6f last=%.6f\n", grid.size(), grid.front(),
         grid.back());
  fflush(stdout);
  const ActionProfile pr =
      action_profile(field, wu, orbit, river, grid, 0.1024, acfg);
  int nvalid = 0;
  for (char v : pr.valid) nvalid += v;
  printf("profile: valid=%d/%zu\n", nvalid, pr.valid.size());

  // dump a coarse view of S, C, angle across the river
  for (std::size_t i = 0; i < pr.theta.size(); i += 16)
    printf("  th=%.6f S=%.6e C=%.6e I=%.6e ang=%.2f v=%d\n", pr.theta[i],
           pr.s[i], pr.c[i], pr.total[i], pr.angle[i], pr.valid[i]);
  printf("  th=%.9f S=%.6e C=%.6e ang=%.2f v=%d (last)\n", pr.theta.back(),
         pr.s.back(), pr.c.back(), pr.angle.back(), pr.valid.back());
  fflush(stdout);

  // monotone violations over the sub-river
  const double theta_hat = 3.613787919070;
  const auto bad = s_monotone_violations(pr, theta_hat, river.theta1);
  printf("S monotone violations in sub-river: %zu\n", bad.size());
  for (std::size_t b : bad)
    printf("  at th=%.9f S=%.9e\n", pr.theta[b], pr.s[b]);
  fflush(stdout);

  // --- minimizer at the four epsilons ---------------------------------
  for (double eps : {0.1024, 4.7595e-2, 3.000e-3, 2.2753e-3}) {
    const ActionProfile pe =
        action_profile(field, wu, orbit, river, grid, eps, acfg);
    // reuse pr's s/c: identical; just select
    const OmSelection sel =
        om_minimizer(field, wu, orbit, pe, theta_hat, river.theta1, acfg);
    printf("eps=%.6e theta_min=%.9f total=%.9e boundary=%d nmin=%zu om_s=%.6f\n",
           eps, sel.theta_min, sel.total, sel.boundary,
           sel.local_minima.size(), sel.om_s);
    for (const auto& m : sel.local_minima)
      printf("    lmin th=%.9f I=%.9e\n", m[0], m[1]);
    fflush(stdout);
  }

  // eps -> 0 boundary behavior
  const ActionProfile p0 =
      action_profile(field, wu, orbit, river, grid, 0.0, acfg);
  const OmSelection s0 =
      om_minimizer(field, wu, orbit, p0, theta_hat, river.theta1, acfg);
  printf("eps=0: theta_min=%.9f boundary=%d\n", s0.theta_min, s0.boundary);

  // jump scan across the target bracket
  std::vector<double> escan;
  for (int i = 0; i <= 12; ++i)
    escan.push_back(3.5e-3 - i * (3.5e-3 - 2.0e-3) / 12);
  const JumpScan js = om_jump_scan(field, wu, orbit, p0, escan, theta_hat,
                                   river.theta1, 0.02, acfg);
  for (const auto& p : js.points)
    printf("scan eps=%.6e th=%.9f total=%.9e b=%d nmin=%zu\n", p.eps,
           p.theta_min, p.total, p.boundary, p.local_minima.size());
  printf("jumps:");
  for (std::size_t j : js.jumps)
    printf(" (%.6e->%.6e: %.6f->%.6f)", js.points[j].eps,
           js.points[j + 1].eps, js.points[j].theta_min,
           js.points[j + 1].theta_min);
  printf("\n");

  // calibration identity check
  const auto cal = calibrate_phase(river.theta1, river.theta2,
                                   4.778099049823, 2.878461721041);
  printf("cal offset=%.3e reflect=%d\n", cal.offset, cal.reflect);
  return 0;
}
