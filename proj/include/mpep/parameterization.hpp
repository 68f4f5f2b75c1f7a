#pragma once

// Parameterization method for the local unstable manifold of the origin of
// the Hamiltonian lift. The origin has a complex unstable eigenvalue pair
// mu, conj(mu); the manifold is written as a two-variable power series
//   P(z1, z2) = sum_{m+n>=1} alpha_mn z1^m z2^n,   alpha_mn in C^4,
// solving F(P(z)) = DP(z) R z order by order (R = diag(mu1, mu2)). Real
// points are P(z, conj z); the boundary circle K(theta) = P(e^{i theta})
// seeds all escape-path computations.

#include <complex>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/lift.hpp"
#include "mpep/orbit.hpp"

namespace mpep {

struct UnstableManifoldConfig {
  int order = 25;
  double residual_tol = 1e-8;   // sup-norm invariance defect on |z| = 1
  double h_tol = 1e-9;          // sup-norm |H| on the patch
  int boundary_samples = 256;
  bool normalize_phase = true;  // rotate eigenvector so x-component > 0 real
  std::complex<double> eigvec_premultiplier{1.0, 0.0};
};

class LocalUnstableManifold {
 public:
  using cd = std::complex<double>;

  int order = 0;
  cd mu1, mu2;          // mu2 = conj(mu1), Re > 0
  double scale = 0.0;   // chosen eigenvector scale (unit-norm base)
  // alpha[idx(m, n)][c], triangular index, components (x, y, p, q).
  std::vector<std::array<cd, 4>> alpha;

  static std::size_t index(int m, int n) {
    const int d = m + n;
    return static_cast<std::size_t>(d * (d + 1) / 2 + n);
  }

  // P(z1, conj z1) truncated at `order_cap` (< 0 means full order); the
  // imaginary residue of the conjugate-symmetric sum is discarded.
  Vec4 eval(cd z1, int order_cap = -1) const;

  Vec4 k_point(double theta) const { return eval(std::polar(1.0, theta)); }

  // d/dtheta of K(theta).
  Vec4 k_tangent(double theta) const;

  // DP(z) R z evaluated at z1 (the flow direction pushed through P).
  Vec4 flow_derivative(cd z1, int order_cap = -1) const;

  // sup over boundary samples of |F(P) - DP R z| with the series truncated
  // at `order_cap`; uses the true drift field, so it is an independent
  // measure of the invariance defect.
  double boundary_residual(const DriftField& field, int samples,
                           int order_cap = -1) const;

  // sup |H(P(z))| over a polar grid of the closed unit disk.
  double patch_hamiltonian_sup(const DriftField& field, int radial,
                               int angular) const;

  // Point of the trajectory through K(theta) at the given distance from O:
  // the preimage radius s solves |P(s e^{i(theta + beta ln s)})| = distance
  // with beta = Im mu / Re mu, so the phase correction keeps the point on
  // the same flow line. Also reports the flow time t_k = -ln(s)/Re mu back
  // up to K(theta).
  Vec4 inner_point(double theta, double distance, double* t_k = nullptr) const;
};

// Builds the manifold for a drift with exact monomial tables (analytic
// ivdp or polynomial drifts). The eigenvector scale is chosen by bisection
// as the largest scale meeting both residual_tol and h_tol on the patch.
LocalUnstableManifold build_unstable_manifold(
    const DriftField& field, const UnstableManifoldConfig& cfg = {});

// Stop conditions for growing unstable-manifold trajectories from K(theta).
struct GrowStop {
  double max_time = 40.0;
  double max_radius = 8.0;               // blow-up guard, sup norm
  const PeriodicOrbit* orbit = nullptr;  // enables boundary-crossing event
  bool stop_on_crossing = true;
};

struct GrownTrajectory {
  Trajectory<4> traj;
  bool crossed = false;   // hit the orbit polygon (outward)
  bool blew_up = false;   // hit the radius guard
  double cross_time = 0.0;
  Vec4 cross_state{};
};

GrownTrajectory grow_from_k(const DriftField& field,
                            const LocalUnstableManifold& wu, double theta,
                            const GrowStop& stop,
                            const IntegratorConfig& integ = {});

}  // namespace mpep
