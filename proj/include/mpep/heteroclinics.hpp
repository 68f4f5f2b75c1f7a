#pragma once

// Transverse intersections of W^u(O) and W^s(Gamma). Candidates come from
// distance minima between grown unstable trajectories and the stable mesh;
// each is refined by bisection on the exit/return dichotomy: on one side of
// a heteroclinic angle trajectories cross the orbit polygon, on the other
// they fall back into a disk around the origin. The refined angles certify
// against both asymptotic ends.

#include <cstddef>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/orbit.hpp"
#include "mpep/parameterization.hpp"
#include "mpep/stable_mesh.hpp"

namespace mpep {

// Fiber circles of the zero-energy level over the orbit: center (-f, -g),
// radius |F|. The deterministic plane's point (p, q) = (0, 0) lies on every
// circle.
struct ExitTorus {
  std::vector<Vec2> base;
  std::vector<Vec2> center;
  std::vector<double> radius;

  Vec4 point(std::size_t k, double beta) const {
    return Vec4{base[k][0], base[k][1],
                center[k][0] + radius[k] * std::cos(beta),
                center[k][1] + radius[k] * std::sin(beta)};
  }
};

ExitTorus build_exit_torus(const DriftField& field, const PeriodicOrbit& orbit);

// W^u(O) sliced by the torus over the circle r = rho: toroidal angle alpha
// (base polar angle) and poloidal angle beta (fiber angle) of the first
// outward crossing, unwrapped along the K parameterization.
struct TorusSection {
  std::vector<double> theta, alpha, beta;  // unwrapped angles per sample
  double toroidal_winding = 0.0;           // (alpha_n - alpha_0) / 2 pi
  double poloidal_winding = 0.0;
};

TorusSection torus_section(const DriftField& field,
                           const LocalUnstableManifold& wu, double rho,
                           int samples, const IntegratorConfig& integ = {});

enum class EscapeClass { exits, returns, undecided };

struct EscapeProbe {
  EscapeClass cls = EscapeClass::undecided;
  double t_end = 0.0;
  double d_gamma = 0.0;  // closest 4D approach to Gamma before the end
  double t_close = 0.0;
  Vec4 end_state{};
};

// First-passage classification: exits = crosses the orbit polygon outward,
// returns = enters the disk of radius inner_radius around the origin.
EscapeProbe classify_escape(const DriftField& field, const PeriodicOrbit& orbit,
                            const Vec4& start, double horizon,
                            double inner_radius,
                            const IntegratorConfig& integ = {});

struct HeteroclinicConfig {
  int coarse_samples = 256;
  double threshold = 1e-2;         // candidate acceptance distance
  double cluster_dtheta = 0.05;    // merge radius in theta
  double inner_radius_factor = 0.5;  // growth stop disk (primary sheet)
  double classify_radius_factor = 0.26;  // dichotomy return disk
  double horizon = 60.0;           // classification horizon
  double refine_dtheta = 1e-12;
  double t_backward = 30.0;        // certification horizon toward O
  double handoff_radius = 0.05;    // series handoff for the backward leg
  double d_o_tol = 1e-6;
  double d_gamma_tol = 1e-4;
  IntegratorConfig integ;
};

struct Candidate {
  double theta = 0.0;
  double dist = 0.0;     // refined 4D distance to the mesh
  double t_wu = 0.0;     // trajectory time of the witness
  Vec4 wu_point{};
  MeshQuery witness;     // nearest stable strip segment
  double strip_tau = 0.0;  // asymptotic phase of the witnessing strip
};

// Locally minimal distances between first-approach unstable trajectories
// and the stable mesh, refined in theta and merged into clusters. The
// trajectories stop at the first polygon crossing or disk return, which
// restricts the search to the primary sheet of W^u(O).
std::vector<Candidate> coarse_intersections(const DriftField& field,
                                            const LocalUnstableManifold& wu,
                                            const StableMesh& mesh,
                                            const PeriodicOrbit& orbit,
                                            const HeteroclinicConfig& cfg = {});

struct Heteroclinic {
  double theta = 0.0;
  double exit_side = 0.0;   // sign of the theta offset whose side exits
  double d_o = 0.0;         // backward distance to O at the horizon
  double d_handoff = 0.0;   // flow vs series residual at the handoff radius
  double d_gamma = 0.0;     // closest forward 4D approach to Gamma
  double t_close = 0.0;
  bool certified = false;
  double transversality = 0.0;  // principal angle, filled by the check
  Candidate witness;
};

// Bisection refinement of the dichotomy starting from a candidate angle.
// Throws if no class change is found near the guess.
Heteroclinic refine_heteroclinic(const DriftField& field,
                                 const LocalUnstableManifold& wu,
                                 const PeriodicOrbit& orbit, double theta_guess,
                                 const HeteroclinicConfig& cfg = {});

// Principal angle between the tangent planes of W^u(O) and W^s(Gamma) at
// the witness point, restricted to the zero-energy level. Both planes
// contain the flow direction, so the first principal angle vanishes and the
// reported transversality measure is the second.
struct TransversalityReport {
  double flow_angle = 0.0;     // first principal angle (near zero)
  double angle = 0.0;          // second principal angle
  double omega_u = 0.0;        // symplectic form on the unstable basis
  double omega_s = 0.0;        // symplectic form on the stable basis
};

TransversalityReport transversality_check(const DriftField& field,
                                          const LocalUnstableManifold& wu,
                                          const StableMesh& mesh,
                                          const PeriodicOrbit& orbit,
                                          const Heteroclinic& het,
                                          double flow_offset = 0.0,
                                          const HeteroclinicConfig& cfg = {});

// Full stage: coarse candidates, refinement, certification, transversality.
std::vector<Heteroclinic> find_heteroclinics(const DriftField& field,
                                             const LocalUnstableManifold& wu,
                                             const StableMesh& mesh,
                                             const PeriodicOrbit& orbit,
                                             const HeteroclinicConfig& cfg = {});

}  // namespace mpep
