#include "mpep/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "mpep/lift.hpp"
#include "mpep/stable_mesh.hpp"

namespace mpep {

namespace {

// Wedge action of the linearization: with P the antisymmetric matrix of
// rho, dP/dt = A P + P A^T, repacked into the 6 independent components.
Vec<6> wedge_rhs(const Mat4& a, const Vec<6>& r) {
  // (i, j) pairs in component order.
  static constexpr int pi[6] = {0, 0, 0, 1, 1, 2};
  static constexpr int pj[6] = {1, 2, 3, 2, 3, 3};
  double p[4][4] = {};
  for (int c = 0; c < 6; ++c) {
    p[pi[c]][pj[c]] = r[c];
    p[pj[c]][pi[c]] = -r[c];
  }
  Vec<6> out{};
  for (int c = 0; c < 6; ++c) {
    const int i = pi[c], j = pj[c];
    double acc = 0.0;
    for (int m = 0; m < 4; ++m)
      acc += a[i * 4 + m] * p[m][j] + a[j * 4 + m] * p[i][m];
    out[c] = acc;
  }
  return out;
}


}  // namespace

Plucker plucker_from_basis(const Vec4& v1, const Vec4& v2) {
  Plucker r;
  int c = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      r.rho[c++] = v1[i] * v2[j] - v1[j] * v2[i];
  if (r.norm() < 1e-12 * norm(v1) * norm(v2))
    throw std::invalid_argument("plucker_from_basis: degenerate plane");
  return r;
}

Plucker unstable_plane(const LocalUnstableManifold& wu) {
  const auto& a10 = wu.alpha[LocalUnstableManifold::index(1, 0)];
  Vec4 re, im;
  for (int i = 0; i < 4; ++i) {
    re[i] = a10[i].real();
    im[i] = a10[i].imag();
  }
  Plucker r = plucker_from_basis(re, im);
  const double n = r.norm();
  for (int i = 0; i < 6; ++i) r.rho[i] /= n;
  return r;
}

Plucker unstable_plane_at(const LocalUnstableManifold& wu, const Vec4& state,
                          double max_distance) {
  if (norm(state) > max_distance)
    throw std::invalid_argument("unstable_plane_at: state too far from O");
  return unstable_plane(wu);
}

Trajectory<6> plucker_flow(const DriftField& field, const Trajectory<4>& traj,
                           const Plucker& initial, const MaslovConfig& cfg) {
  auto rhs = [&](double t, const Vec<6>& r, Vec<6>& dr) {
    const Vec4 z = traj.state_at(t);
    dr = wedge_rhs(lift_linearization(field, z).a, r);
  };
  auto renorm = [&](double, Vec<6>& r) {
    const double n = norm(r);
    if (n < cfg.renorm_lo || n > cfg.renorm_hi)
      for (int i = 0; i < 6; ++i) r[i] /= n;
  };
  return integrate<6>(rhs, initial.rho, traj.t_start(), traj.t_final(),
                      cfg.integ, {}, renorm);
}

ConjugateRecord conjugate_points(const DriftField& field,
                                 const LocalUnstableManifold& wu,
                                 const PeriodicOrbit& orbit, double theta,
                                 const MaslovConfig& cfg) {
  ConjugateRecord rec;
  rec.theta = theta;

  const Vec4 z0 = wu.inner_point(theta, cfg.inner_distance, &rec.t_k);

  const Plucker rho0 = unstable_plane_at(wu, z0, 2.0 * cfg.inner_distance);

  auto rhs = [&](double, const Vec<10>& s, Vec<10>& ds) {
    const Vec4 z{s[0], s[1], s[2], s[3]};
    const Vec4 f = lift_rhs(field, z);
    Vec<6> r;
    for (int i = 0; i < 6; ++i) r[i] = s[4 + i];
    const Vec<6> dr = wedge_rhs(lift_linearization(field, z).a, r);
    for (int i = 0; i < 4; ++i) ds[i] = f[i];
    for (int i = 0; i < 6; ++i) ds[4 + i] = dr[i];
  };
  auto renorm = [&](double, Vec<10>& s) {
    double n = 0.0;
    for (int i = 4; i < 10; ++i) n += s[i] * s[i];
    n = std::sqrt(n);
    if (n < cfg.renorm_lo || n > cfg.renorm_hi)
      for (int i = 4; i < 10; ++i) s[i] /= n;
  };
  std::vector<EventSpec<10>> evs;
  evs.push_back({[&orbit](double, const Vec<10>& s) {
                   return orbit.radial_gap(s[0], s[1]);
                 },
                 EventDirection::rising, true});
  evs.push_back({[&](double, const Vec<10>& s) {
                   return orbit_distance_4d(orbit, Vec4{s[0], s[1], s[2],
                                                        s[3]}) -
                          cfg.arrive_distance;
                 },
                 EventDirection::falling, true});
  evs.push_back({[](double, const Vec<10>& s) { return s[4]; },
                 EventDirection::any, false});

  Vec<10> y0{};
  for (int i = 0; i < 4; ++i) y0[i] = z0[i];
  for (int i = 0; i < 6; ++i) y0[4 + i] = rho0.rho[i];
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = true;
  rec.path = integrate<10>(rhs, y0, 0.0, cfg.max_time, ic, evs, renorm);

  rec.t_end = rec.path.t_final();
  const Vec<10>& fin = rec.path.final_state();
  rec.end_state = Vec4{fin[0], fin[1], fin[2], fin[3]};
  rec.exited = rec.path.first_hit(0) != nullptr;
  rec.arrived = rec.path.first_hit(1) != nullptr;
  if (rec.t_k <= rec.t_end) {
    const Vec<10> at_k = rec.path.state_at(rec.t_k);
    rec.d_k = norm(Vec4{at_k[0], at_k[1], at_k[2], at_k[3]} -
                   wu.k_point(theta));
  }

  const auto& nt = rec.path.node_t;
  const auto& ny = rec.path.node_y;
  rec.sample_t = nt;
  rec.sample_rho12.resize(ny.size());
  for (std::size_t i = 0; i < ny.size(); ++i) rec.sample_rho12[i] = ny[i][4];

  auto rho_norm_at = [&](const Vec<10>& s) {
    double n = 0.0;
    for (int i = 4; i < 10; ++i) n += s[i] * s[i];
    return std::sqrt(n);
  };

  // Degeneracy guard: rho12 pinned near zero over a long span.
  double span_start = 0.0;
  bool in_small = false;
  for (std::size_t i = 0; i < ny.size(); ++i) {
    const bool small = std::abs(ny[i][4]) < cfg.rho12_tol * rho_norm_at(ny[i]);
    if (small && !in_small) {
      in_small = true;
      span_start = nt[i];
    } else if (!small && in_small) {
      in_small = false;
      if (nt[i - 1] - span_start > cfg.degenerate_span)
        throw std::runtime_error("conjugate_points: rho12 degenerate span");
    }
  }
  if (in_small && nt.back() - span_start > cfg.degenerate_span)
    throw std::runtime_error("conjugate_points: rho12 degenerate span");

  for (const auto& hit : rec.path.hits) {
    if (hit.event != 2) continue;
    ConjugatePoint cp;
    cp.t = hit.t;
    cp.tau = hit.t - rec.t_k;
    rec.points.push_back(cp);
  }

  // Tangential zeros: local minima of |rho12| that dip below the relative
  // threshold without a sign change. Node minima are sharpened on the dense
  // output by golden section before thresholding.
  constexpr double invphi = 0.6180339887498949;
  auto abs_rho12 = [&](double t) {
    return std::abs(rec.path.state_at(t)[4]);
  };
  for (std::size_t i = 1; i + 1 < ny.size(); ++i) {
    const double b = std::abs(ny[i][4]);
    if (!(b <= std::abs(ny[i - 1][4]) && b < std::abs(ny[i + 1][4])))
      continue;
    if (b >= 1e-2 * rho_norm_at(ny[i])) continue;
    if (ny[i - 1][4] * ny[i + 1][4] < 0.0) continue;  // covered by a hit
    double lo = nt[i - 1], hi = nt[i + 1];
    double m1 = hi - invphi * (hi - lo), m2 = lo + invphi * (hi - lo);
    double f1 = abs_rho12(m1), f2 = abs_rho12(m2);
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
      if (f1 < f2) {
        hi = m2, m2 = m1, f2 = f1;
        m1 = hi - invphi * (hi - lo);
        f1 = abs_rho12(m1);
      } else {
        lo = m1, m1 = m2, f1 = f2;
        m2 = lo + invphi * (hi - lo);
        f2 = abs_rho12(m2);
      }
    }
    const double tm = 0.5 * (lo + hi);
    if (abs_rho12(tm) >= cfg.rho12_tol * rho_norm_at(rec.path.state_at(tm)))
      continue;
    bool near_hit = false;
    for (const auto& cp : rec.points)
      if (std::abs(cp.t - tm) < 1e-6) near_hit = true;
    if (near_hit) continue;
    ConjugatePoint cp;
    cp.t = tm;
    cp.tau = tm - rec.t_k;
    cp.multiplicity = 2;
    cp.tangential = true;
    rec.points.push_back(cp);
    rec.flagged = true;
  }

  std::sort(rec.points.begin(), rec.points.end(),
            [](const ConjugatePoint& a, const ConjugatePoint& b) {
              return a.t < b.t;
            });
  rec.maslov_index = 0;
  for (const auto& cp : rec.points) rec.maslov_index += cp.multiplicity;
  return rec;
}

}  // namespace mpep
