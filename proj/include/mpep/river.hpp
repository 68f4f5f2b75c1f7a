#pragma once
// The River: the arc of K between the heteroclinic banks whose trajectories
// exit through Gamma, the transition map G onto the exit torus, the
// zero-Maslov sub-river, the pivot angle, and the mouth set Q.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/heteroclinics.hpp"
#include "mpep/maslov.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

namespace mpep {

// Exit arc of K bounded by two heteroclinic angles. theta1 is the bank
// whose interior neighbors carry Maslov index 0, theta2 the opposite bank;
// the River is the open arc between them.
struct RiverInterval {
  double theta1 = 0.0;
  double theta2 = 0.0;

  double lo() const { return std::min(theta1, theta2); }
  double hi() const { return std::max(theta1, theta2); }
  double width() const { return hi() - lo(); }
  bool inside(double theta) const { return theta > lo() && theta < hi(); }
};

// Identifies the River among the arcs cut by the heteroclinic angles: the
// non-wrapping arc whose midpoint trajectory exits, oriented by probing the
// Maslov index near each bank.
RiverInterval find_river(const DriftField& field,
                         const LocalUnstableManifold& wu,
                         const PeriodicOrbit& orbit,
                         const std::vector<Heteroclinic>& hets,
                         const MaslovConfig& cfg = {});

// Image of one K angle under the transition map G.
struct ExitPoint {
  double theta = 0.0;
  Vec4 state{};          // on the exit torus: (x, y) on Gamma, H = 0
  Vec4 raw{};            // crossing state before the torus projection
  double t_exit = 0.0;   // flow time from the K crossing
  double s = 0.0;        // arc-length position of (x, y) along Gamma
  double angle_swept = 0.0;  // polar angle accumulated around O since K
  int winding = 0;           // full revolutions around O before exit
  int maslov_index = 0;      // conjugate points strictly before the exit
  bool flagged = false;
};

// G(K(theta)): first outward crossing of Gamma, with the conjugate count
// along the way. Empty when the trajectory does not cross within
// cfg.max_time (expected at and outside the banks).
std::optional<ExitPoint> transition_map(const DriftField& field,
                                        const LocalUnstableManifold& wu,
                                        const PeriodicOrbit& orbit,
                                        double theta,
                                        const MaslovConfig& cfg = {});

struct PivotConfig {
  int seed_samples = 256;     // predicate grid strictly inside the banks
  double dtheta_tol = 1e-10;  // bisection width
  MaslovConfig maslov;
};

struct Pivot {
  double theta_hat = 0.0;
  ExitPoint exit;         // G(K(theta_hat))
  double tau_conj = 0.0;  // first conjugate time on the index-1 side
  double tau_exit = 0.0;  // exit time on the index-1 side
  std::vector<std::array<double, 2>> brackets;  // all predicate flips
};

// theta_hat = inf{theta | G(K(theta)) is zero-Maslov}: a grid scan records
// every predicate flip, then bisection refines the infimum-side bracket.
Pivot pivot_theta(const DriftField& field, const LocalUnstableManifold& wu,
                  const PeriodicOrbit& orbit, const RiverInterval& river,
                  const PivotConfig& cfg = {});

// The exit arc position advances by ~total_arc/(lambda T) per e-fold of
// bank distance, so covering Gamma to a 1% gap needs the tail ratio close
// to 1 and a depth of several wraps; the 4D arrive cutoff bounds how close
// to the bank G remains resolvable.
struct MouthConfig {
  int uniform_samples = 64;  // uniform grid over the pivot-side 3/4 of the arc
  int refine_steps = 200;    // geometric tail toward theta1
  double refine_ratio = 0.94;
  double cover_gap = 0.12;   // split pairs whose exits are farther apart
  int refine_budget = 600;   // extra samples for the adaptive splits
  MaslovConfig maslov;

  MouthConfig() { maslov.arrive_distance = 1e-4; }
};

// The mouth set Q = G(K(theta1, theta_hat)), ordered from the pivot toward
// the bank and sampled geometrically toward theta1 where winding diverges.
std::vector<ExitPoint> mouth_of_river(const DriftField& field,
                                      const LocalUnstableManifold& wu,
                                      const PeriodicOrbit& orbit,
                                      const RiverInterval& river,
                                      const Pivot& pivot,
                                      const MouthConfig& cfg = {});

struct SecondVariation {
  bool granted = false;
  double v1_max_cond = 0.0;      // max condition number of V1
  double symmetry_defect = 0.0;  // max |W - W^T| / |W|
  double min_probe = 0.0;        // smallest second variation over probes
  double form_gap = 0.0;         // max relative gap between the two forms
  std::vector<double> probes;    // second variation per perturbation
};

// Minimizer certificate: evolves the frame V = (V1; V2) of the unstable
// plane along the trajectory, requires V1 invertible throughout, checks
// Riccati symmetry of W = -V2 V1^{-1}, and evaluates the second variation
// on random compactly supported perturbations through both the direct
// quadratic form and the completed square ([B-W]h - h')^T([B-W]h - h').
SecondVariation second_variation_check(const DriftField& field,
                                       const LocalUnstableManifold& wu,
                                       const PeriodicOrbit& orbit,
                                       double theta, int probes = 10,
                                       std::uint64_t seed = 1,
                                       const MaslovConfig& cfg = {});

}  // namespace mpep
