#pragma once
// Tangent 2-planes along lift trajectories tracked in Plucker coordinates.
// A conjugate point is a zero of rho12 (the plane meets the vertical
// Dirichlet plane), and the Maslov index counts them with multiplicity.

#include <vector>

#include "mpep/algebra.hpp"
#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"

namespace mpep {

// Components ordered (12, 13, 14, 23, 24, 34) over coordinates (x, y, p, q),
// defined up to a common positive scale.
struct Plucker {
  Vec<6> rho{};

  double norm() const { return mpep::norm(rho); }
  // Decomposability defect rho12 rho34 - rho13 rho24 + rho14 rho23.
  double relation() const {
    return rho[0] * rho[5] - rho[1] * rho[4] + rho[2] * rho[3];
  }
  // A plane is Lagrangian iff rho13 + rho24 = 0.
  double lagrangian_defect() const { return rho[1] + rho[4]; }
};

// rho_ij = det[[v1_i, v1_j], [v2_i, v2_j]]. Throws on a degenerate pair.
Plucker plucker_from_basis(const Vec4& v1, const Vec4& v2);

// Unstable eigenplane of the lift linearization at the origin, spanned by
// the real and imaginary parts of the leading eigenvector.
Plucker unstable_plane(const LocalUnstableManifold& wu);

// Same plane with the near-origin precondition of the tracking procedure.
Plucker unstable_plane_at(const LocalUnstableManifold& wu, const Vec4& state,
                          double max_distance = 1e-5);

struct MaslovConfig {
  double inner_distance = 1e-5;   // hand-off distance from the origin
  double rho12_tol = 1e-8;        // tangential-zero threshold, times |rho|
  double renorm_lo = 1e-3;        // renormalization band for |rho|
  double renorm_hi = 1e3;
  double degenerate_span = 1e-2;  // rho12 small over longer spans -> error
  double arrive_distance = 1e-3;  // 4D approach that ends the window
  double max_time = 200.0;
  IntegratorConfig integ;
};

// rho(t) integrated along a dense-output trajectory, renormalized into the
// configured band. Node times follow the flow's own adaptive steps.
Trajectory<6> plucker_flow(const DriftField& field, const Trajectory<4>& traj,
                           const Plucker& initial,
                           const MaslovConfig& cfg = {});

struct ConjugatePoint {
  double t = 0.0;    // time from the inner starting point
  double tau = 0.0;  // time relative to the K crossing (t - t_k)
  int multiplicity = 1;
  bool tangential = false;
};

struct ConjugateRecord {
  double theta = 0.0;
  double t_k = 0.0;    // flow time from the inner point to K(theta)
  double d_k = 0.0;    // shadowing gap |z(t_k) - K(theta)|
  double t_end = 0.0;  // end of the tracked window (from the inner point)
  bool exited = false;     // window ended at the outward polygon crossing
  bool arrived = false;    // window ended at the 4D approach to the orbit
  Vec4 end_state{};
  std::vector<ConjugatePoint> points;
  int maslov_index = 0;
  bool flagged = false;  // a tangential zero was counted
  Trajectory<10> path;   // joint (state, rho) dense trajectory
  std::vector<double> sample_t, sample_rho12;  // nodes, for traces
};

// Three-step tracking for the W^u trajectory through K(theta): series
// inner point near O, eigenplane initialization, forward integration of
// the joint system with rho12 zero detection until the outward polygon
// crossing, the 4D arrival at the orbit, or max_time.
ConjugateRecord conjugate_points(const DriftField& field,
                                 const LocalUnstableManifold& wu,
                                 const PeriodicOrbit& orbit, double theta,
                                 const MaslovConfig& cfg = {});

}  // namespace mpep
