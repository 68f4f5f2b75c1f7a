#pragma once

// Mesh of the stable manifold of the lifted periodic orbit. Each orbit
// sample Gamma_k seeds a strip: the backward trace of Gamma_k + nu xi_k,
// where xi_k is the transported stable direction. The strips are flow
// lines of W^s(Gamma) labelled by asymptotic phase; a 4D segment hash
// supports nearest-strip queries during the heteroclinic search.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "mpep/drift.hpp"
#include "mpep/integrator.hpp"
#include "mpep/orbit.hpp"

namespace mpep {

struct StableMeshConfig {
  double offset = 1e-5;          // seed displacement nu
  double t_back = 14.0;          // backward horizon per strip
  double chord = 0.05;           // 4D decimation chord
  double h_drift_factor = 1e-6;  // reproject when |H| > factor * nu
  double max_radius = 6.0;       // abandon a strip past this sup norm
  std::size_t stride = 1;        // every stride-th orbit sample seeds a strip
  bool inner = true;             // branch whose displacement enters the basin
  double cell = 0.1;             // spatial hash cell edge
  IntegratorConfig integ;
};

struct StableStrip {
  std::size_t seed_index = 0;  // orbit sample index
  double tau = 0.0;            // orbit time of the seed (asymptotic phase)
  Vec4 seed{};                 // projected seed point
  std::vector<double> times;   // backward times, 0 to -t_back
  std::vector<Vec4> points;    // decimated trace
};

struct MeshQuery {
  double dist = std::numeric_limits<double>::infinity();
  std::size_t strip = static_cast<std::size_t>(-1);
  std::size_t seg = 0;    // segment starts at strips[strip].points[seg]
  double u = 0.0;         // parameter along the segment
  Vec4 closest{};

  bool found() const { return strip != static_cast<std::size_t>(-1); }
};

class StableMesh {
 public:
  std::vector<StableStrip> strips;

  // Nearest strip segment; exhaustive within one hash cell of `pt`, so the
  // result is authoritative only when dist <= reach().
  MeshQuery nearest(const Vec4& pt) const;

  double reach() const { return cell_; }
  std::size_t segment_count() const { return seg_strip_.size(); }

  void build_index(double cell);

 private:
  double cell_ = 0.1;
  std::vector<std::uint32_t> seg_strip_, seg_point_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

StableMesh build_stable_mesh(const DriftField& field,
                             const PeriodicOrbit& orbit,
                             const StableMeshConfig& cfg = {});

// Distance from a lift state to the orbit as a curve in R^4 (momenta are
// zero on Gamma, so the polygon projection extends with the momentum norm).
double orbit_distance_4d(const PeriodicOrbit& orbit, const Vec4& s);

}  // namespace mpep
