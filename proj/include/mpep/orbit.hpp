#pragma once

// The basin-bounding periodic orbit Gamma and derived geometry:
//  - equal-time samples Gamma_k and the closed polygon through them,
//  - star-shaped point classification and radial crossing tests,
//  - arc-length positions along the polygon,
//  - lift monodromy, Floquet multipliers and transported stable directions.

#include <cstddef>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"

namespace mpep {

struct OrbitConfig {
  std::size_t n_samples = 1024;
  double relax_time = 80.0;      // backward relaxation onto the orbit
  Vec2 relax_start{1.5, 0.0};    // any basin point away from the focus
  double section_residual = 1e-10;
  // The repelling multiplier (~1.3e3) amplifies local error over a period,
  // so the orbit itself is integrated tighter than downstream sweeps.
  IntegratorConfig integ{.rtol = 1e-12, .atol = 1e-14};
};

class PeriodicOrbit {
 public:
  double period = 0.0;
  std::vector<double> tau;     // sample times in [0, T), tau[0] = 0
  std::vector<Vec2> points;    // Gamma(tau_k)
  std::vector<Vec4> stable_dirs;  // unit 4D stable directions of the lift
  Mat4 monodromy{};            // lift monodromy over one period at tau[0]
  double multiplier = 0.0;     // deterministic repelling multiplier (> 1)
  double log_multiplier = 0.0; // loop integral of div F
  std::array<double, 4> lift_multipliers{};  // moduli sorted ascending
  Trajectory<2> path;          // dense orbit over [0, T]

  std::size_t size() const { return points.size(); }

  // Radius of the polygon boundary along the ray at angle phi.
  double boundary_radius(double phi) const;

  // r(x, y) - r_Gamma(phi): negative strictly inside, positive outside.
  double radial_gap(double x, double y) const {
    const double r = std::hypot(x, y);
    if (r < r_inside_) return r - r_inside_;
    return r - boundary_radius(std::atan2(y, x));
  }

  bool contains(double x, double y) const { return radial_gap(x, y) < 0.0; }

  // Conservative radii: r < r_inside() is inside for every angle, and
  // r > r_outside() is outside for every angle.
  double r_inside() const { return r_inside_; }
  double r_outside() const { return r_outside_; }

  double total_arc() const { return arc_.back(); }

  struct Projection {
    double s = 0.0;       // arc-length position of the nearest polygon point
    double dist = 0.0;    // distance to the polygon
    Vec2 point{};         // nearest polygon point
    std::size_t edge = 0;
  };

  // Nearest point on the polygon (brute force over edges).
  Projection project(double x, double y) const;

  double distance(double x, double y) const { return project(x, y).dist; }

  Vec2 point_at_arc(double s) const;

  void build_geometry();  // fills angle table, arc lengths, radii

 private:
  std::vector<double> arc_;         // cumulative chord length, size n+1
  std::vector<double> sorted_phi_;  // vertex angles, increasing
  std::vector<std::size_t> sorted_idx_;  // vertex index per sorted angle
  double r_inside_ = 0.0;
  double r_outside_ = 0.0;
};

// Locates the orbit by backward relaxation followed by a secant
// refinement of the Poincare return map on the section {y = 0, x > 0}.
PeriodicOrbit find_periodic_orbit(const DriftField& field,
                                  const OrbitConfig& cfg = {});

}  // namespace mpep
