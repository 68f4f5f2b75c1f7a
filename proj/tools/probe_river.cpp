#include <chrono>
#include <cstdio>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/river.hpp"
#include "mpep/stable_mesh.hpp"

using namespace mpep;

int main() {
  const IvdpDrift field(0.5);
  const auto orbit = find_periodic_orbit(field);
  const auto wu = build_unstable_manifold(field);
  const auto mesh = build_stable_mesh(field, orbit);
  const auto hets = find_heteroclinics(field, wu, mesh, orbit);
  std::printf("hets: %zu\n", hets.size());

  auto t0 = std::chrono::steady_clock::now();
  const auto river = find_river(field, wu, orbit, hets);
  std::printf("river theta1=%.12f theta2=%.12f\n", river.theta1,
              river.theta2);

  const auto piv = pivot_theta(field, wu, orbit, river);
  auto t1 = std::chrono::steady_clock::now();
  std::printf(
      "pivot theta_hat=%.12f tau_conj=%.9f tau_exit=%.9f diff=%.3e "
      "brackets=%zu  (%.1f s)\n",
      piv.theta_hat, piv.tau_conj, piv.tau_exit,
      piv.tau_exit - piv.tau_conj, piv.brackets.size(),
      std::chrono::duration<double>(t1 - t0).count());
  std::printf("pivot exit s=%.6f t_exit=%.6f winding=%d idx=%d\n",
              piv.exit.s, piv.exit.t_exit, piv.exit.winding,
              piv.exit.maslov_index);

  for (double th : {3.2, 4.0, 4.44, 4.7}) {
    const auto ep = transition_map(field, wu, orbit, th);
    if (!ep) {
      std::printf("theta=%.3f NO EXIT\n", th);
      continue;
    }
    std::printf(
        "theta=%.3f s=%.6f t_exit=%.4f swept=%.4f wind=%d idx=%d "
        "|H|=%.2e snap=%.2e\n",
        th, ep->s, ep->t_exit, ep->angle_swept, ep->winding,
        ep->maslov_index, 0.0, norm(ep->state - ep->raw));
  }

  const auto mouth = mouth_of_river(field, wu, orbit, river, piv);
  std::printf("mouth: %zu points\n", mouth.size());
  for (std::size_t i = 0; i < mouth.size(); i += 17)
    std::printf("  th=%.9f s=%.6f wind=%d t_exit=%.4f\n", mouth[i].theta,
                mouth[i].s, mouth[i].winding, mouth[i].t_exit);
  std::printf("  th=%.9f s=%.6f wind=%d t_exit=%.4f (last)\n",
              mouth.back().theta, mouth.back().s, mouth.back().winding,
              mouth.back().t_exit);

  auto t2 = std::chrono::steady_clock::now();
  for (double th : {4.3, 4.5}) {
    const auto sv = second_variation_check(field, wu, orbit, th);
    std::printf(
        "sv theta=%.2f granted=%d cond=%.3e sym=%.3e min_probe=%.6e "
        "gap=%.3e\n",
        th, (int)sv.granted, sv.v1_max_cond, sv.symmetry_defect,
        sv.min_probe, sv.form_gap);
  }
  const auto sv_bad = second_variation_check(field, wu, orbit, 3.2);
  std::printf("sv theta=3.20 granted=%d cond=%.3e (index-1, expect refusal)\n",
              (int)sv_bad.granted, sv_bad.v1_max_cond);
  auto t3 = std::chrono::steady_clock::now();
  std::printf("sv timing: %.2f s for 3 checks\n",
              std::chrono::duration<double>(t3 - t2).count());
  return 0;
}
