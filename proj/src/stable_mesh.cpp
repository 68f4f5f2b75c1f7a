#include "mpep/stable_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpep/lift.hpp"

namespace mpep {

namespace {

std::uint64_t cell_key(const std::array<std::int64_t, 4>& c) {
  std::uint64_t k = 0;
  for (int i = 0; i < 4; ++i)
    k = (k << 16) | static_cast<std::uint64_t>((c[i] + 32768) & 0xFFFF);
  return k;
}

std::array<std::int64_t, 4> cell_of(const Vec4& p, double cell) {
  std::array<std::int64_t, 4> c{};
  for (int i = 0; i < 4; ++i)
    c[i] = static_cast<std::int64_t>(std::floor(p[i] / cell));
  return c;
}

double point_segment_dist(const Vec4& p, const Vec4& a, const Vec4& b,
                          double& u, Vec4& closest) {
  const Vec4 d = b - a;
  const double dd = dot(d, d);
  u = dd > 0.0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
  closest = a + u * d;
  return norm(p - closest);
}

}  // namespace

void StableMesh::build_index(double cell) {
  cell_ = cell;
  seg_strip_.clear();
  seg_point_.clear();
  cells_.clear();
  for (std::size_t s = 0; s < strips.size(); ++s) {
    const auto& pts = strips[s].points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const std::uint32_t id = static_cast<std::uint32_t>(seg_strip_.size());
      seg_strip_.push_back(static_cast<std::uint32_t>(s));
      seg_point_.push_back(static_cast<std::uint32_t>(i));
      auto lo = cell_of(pts[i], cell_), hi = lo;
      const auto cb = cell_of(pts[i + 1], cell_);
      for (int d = 0; d < 4; ++d) {
        lo[d] = std::min(lo[d], cb[d]);
        hi[d] = std::max(hi[d], cb[d]);
      }
      std::array<std::int64_t, 4> c{};
      for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0])
        for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
          for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
            for (c[3] = lo[3]; c[3] <= hi[3]; ++c[3])
              cells_[cell_key(c)].push_back(id);
    }
  }
}

MeshQuery StableMesh::nearest(const Vec4& pt) const {
  MeshQuery best;
  const auto base = cell_of(pt, cell_);
  std::array<std::int64_t, 4> c{};
  for (c[0] = base[0] - 1; c[0] <= base[0] + 1; ++c[0])
    for (c[1] = base[1] - 1; c[1] <= base[1] + 1; ++c[1])
      for (c[2] = base[2] - 1; c[2] <= base[2] + 1; ++c[2])
        for (c[3] = base[3] - 1; c[3] <= base[3] + 1; ++c[3]) {
          const auto it = cells_.find(cell_key(c));
          if (it == cells_.end()) continue;
          for (const std::uint32_t id : it->second) {
            const auto& strip = strips[seg_strip_[id]];
            const std::size_t i = seg_point_[id];
            double u;
            Vec4 closest;
            const double d = point_segment_dist(pt, strip.points[i],
                                                strip.points[i + 1], u,
                                                closest);
            if (d < best.dist) {
              best.dist = d;
              best.strip = seg_strip_[id];
              best.seg = i;
              best.u = u;
              best.closest = closest;
            }
          }
        }
  return best;
}

StableMesh build_stable_mesh(const DriftField& field,
                             const PeriodicOrbit& orbit,
                             const StableMeshConfig& cfg) {
  if (orbit.stable_dirs.size() != orbit.size())
    throw std::invalid_argument("build_stable_mesh: orbit lacks directions");

  const double nu = cfg.offset;
  const double h_gate = cfg.h_drift_factor * nu;
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = false;

  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  auto reproject = [&](double, Vec4& s) {
    const DriftDerivs d = field.derivs(s[0], s[1]);
    if (std::abs(hamiltonian(d, s)) > h_gate) s = project_to_zero_energy(d, s);
  };
  const double rmax = cfg.max_radius;
  const std::vector<EventSpec<4>> guard{
      {[rmax](double, const Vec4& y) { return norm_inf(y) - rmax; },
       EventDirection::rising, true}};

  StableMesh mesh;
  for (std::size_t k = 0; k < orbit.size(); k += cfg.stride) {
    const Vec2& g = orbit.points[k];
    const Vec4& xi = orbit.stable_dirs[k];
    // Pick the sign whose (x, y) displacement lands on the requested side.
    const double gap =
        orbit.radial_gap(g[0] + nu * xi[0], g[1] + nu * xi[1]);
    const double sign = ((gap < 0.0) == cfg.inner) ? 1.0 : -1.0;
    Vec4 seed{g[0] + sign * nu * xi[0], g[1] + sign * nu * xi[1],
              sign * nu * xi[2], sign * nu * xi[3]};
    seed = project_to_zero_energy(field.derivs(seed[0], seed[1]), seed);

    const auto traj =
        integrate<4>(rhs, seed, 0.0, -cfg.t_back, ic, guard, reproject);

    StableStrip strip;
    strip.seed_index = k;
    strip.tau = orbit.tau[k];
    strip.seed = seed;
    strip.times.push_back(traj.node_t.front());
    strip.points.push_back(traj.node_y.front());
    for (std::size_t i = 1; i < traj.node_y.size(); ++i) {
      const bool last = i + 1 == traj.node_y.size();
      if (norm(traj.node_y[i] - strip.points.back()) >= cfg.chord || last) {
        strip.times.push_back(traj.node_t[i]);
        strip.points.push_back(traj.node_y[i]);
      }
    }
    mesh.strips.push_back(std::move(strip));
  }
  mesh.build_index(cfg.cell);
  return mesh;
}

double orbit_distance_4d(const PeriodicOrbit& orbit, const Vec4& s) {
  const double planar = orbit.distance(s[0], s[1]);
  return std::sqrt(planar * planar + s[2] * s[2] + s[3] * s[3]);
}

}  // namespace mpep
