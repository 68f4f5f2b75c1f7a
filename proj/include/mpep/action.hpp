#pragma once
// Action along River trajectories: the Freidlin-Wentzell integral S, the
// divergence correction C that weights cycling, the combined total
// I_eps = S + eps C, the minimizer selection (the most probable escape
// path), and the scan of the minimizer against eps for branch jumps.

#include <array>
#include <cstddef>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/river.hpp"

namespace mpep {

struct ActionConfig {
  double r0 = 0.1;               // truncation sphere radius around the origin
  double border_distance = 0.0;  // stop this far from Gamma; 0 = at crossing
  double inner_distance = 1e-5;  // launch distance on the unstable manifold
  double max_time = 200.0;
  IntegratorConfig integ;
};

// One trajectory through K(theta), truncated between the r0 sphere around
// the origin and the border. The truncation time is located through the
// manifold conjugacy, so the window start varies smoothly with theta; both
// integrals run over [t_start, t_end], and the piece of S accumulated
// before t_start is reported separately (it decays quadratically with the
// launch distance, so the window choice is benign for S but essential for
// C, whose integrand does not vanish at the origin).
struct ActionLeg {
  double theta = 0.0;
  double t_start = 0.0;     // time of leaving the r0 sphere
  double t_end = 0.0;
  double s_action = 0.0;    // (1/2) int (p^2 + q^2) dt
  double s_tail = 0.0;      // same integral over [0, t_start]
  double om_c = 0.0;        // int div F dt
  double angle_swept = 0.0; // polar angle around the origin over the window
  double h_drift = 0.0;     // max |H| seen at the quadrature nodes
  bool exited = false;
  Vec4 end_state{};
  Trajectory<4> path;
};

// Integrates the planar lift from the manifold through K(theta) until the
// border event and evaluates both window integrals. Throws when the r0
// sphere does not enclose the launch point.
ActionLeg action_leg(const DriftField& field, const LocalUnstableManifold& wu,
                     const PeriodicOrbit& orbit, double theta,
                     const ActionConfig& cfg = {});

// (1/2) int (p^2 + q^2) dt over [t0, t1], evaluated per dense segment with
// a 7-point Gauss rule, which is exact on the quartic interpolant. When
// given, max_h receives the largest |H| sampled; values above 1e-6 mean
// the trajectory has drifted off the energy shell and the result should be
// treated as a warning.
double fw_action(const DriftField& field, const Trajectory<4>& path,
                 double t0, double t1, double* max_h = nullptr);

// int div F dt over [t0, t1]. Throws when the window starts inside the
// r0/2 circle: the integrand stays near div F at the origin there, so the
// integral grows without bound as the start point approaches it.
double om_correction(const DriftField& field, const Trajectory<4>& path,
                     double t0, double t1, double r0);

// S, C, and the eps-weighted total tabulated over a theta grid. The total
// is affine in eps by construction, so one profile serves every eps.
struct ActionProfile {
  std::vector<double> theta;   // ascending
  std::vector<double> s;
  std::vector<double> c;
  std::vector<double> total;   // s + eps * c
  std::vector<double> angle;   // angle_swept of each leg
  std::vector<char> valid;     // leg exited through the border
  double eps = 0.0;
  double r0 = 0.1;
  double border_distance = 0.0;
  double theta1 = 0.0;         // bank marks
  double theta2 = 0.0;

  double total_at(std::size_t i, double e) const { return s[i] + e * c[i]; }
};

// Grid over the open River arc: uniform points plus a geometric tail
// toward theta1 that resolves the winding ladder compressing against the
// stable bank.
std::vector<double> profile_grid(const RiverInterval& river,
                                 int uniform_n = 257, int tail_steps = 60,
                                 double tail_ratio = 0.85,
                                 double tail_start = 0.15);

// Evaluates one leg per grid angle. Legs that fail to reach the border are
// kept with valid = 0; configuration errors propagate.
ActionProfile action_profile(const DriftField& field,
                             const LocalUnstableManifold& wu,
                             const PeriodicOrbit& orbit,
                             const RiverInterval& river,
                             const std::vector<double>& thetas, double eps,
                             const ActionConfig& cfg = {});

// Grid indices inside (lo, hi) where S fails to decrease strictly stepping
// toward theta1.
std::vector<std::size_t> s_monotone_violations(const ActionProfile& profile,
                                               double lo, double hi);

struct OmSelection {
  double theta_min = 0.0;
  double total = 0.0;          // I_eps at theta_min
  bool boundary = false;       // grid argmin sat at the window edge
  double om_s = 0.0;           // arc position of the exit on Gamma
  Vec2 om_point{};             // exit location projected onto Gamma
  ActionLeg trajectory;        // leg through theta_min
  std::vector<std::array<double, 2>> local_minima;  // (theta, total) pairs
};

// Grid argmin of the profile total over (lo, hi) refined by golden-section
// search on fresh legs to width 1e-6. Every interior local minimum is
// refined and listed; a window-edge argmin is flagged instead of refined.
OmSelection om_minimizer(const DriftField& field,
                         const LocalUnstableManifold& wu,
                         const PeriodicOrbit& orbit,
                         const ActionProfile& profile, double lo, double hi,
                         const ActionConfig& cfg = {});

struct JumpPoint {
  double eps = 0.0;
  double theta_min = 0.0;
  double total = 0.0;
  bool boundary = false;
  std::vector<std::array<double, 2>> local_minima;
};

struct JumpScan {
  std::vector<JumpPoint> points;     // one per eps, in the given order
  std::vector<std::size_t> jumps;    // i where points[i] -> points[i+1] jumps
  double jump_tol = 0.02;
};

// Minimizer against eps over one shared profile. Throws when the grid does
// not extend at least a half-wind beyond any selected minimizer, since a
// competing branch could then hide past the tail.
JumpScan om_jump_scan(const DriftField& field, const LocalUnstableManifold& wu,
                      const PeriodicOrbit& orbit, const ActionProfile& profile,
                      const std::vector<double>& eps_grid, double lo,
                      double hi, double jump_tol = 0.02,
                      const ActionConfig& cfg = {});

// Single offset/reflection aligning the raw eigenvector phase with a
// reference convention, fixed by matching both bank angles.
struct PhaseCalibration {
  double offset = 0.0;
  bool reflect = false;

  double apply(double theta) const;
};

PhaseCalibration calibrate_phase(double raw1, double raw2, double ref1,
                                 double ref2, double tol = 1e-6);

}  // namespace mpep
