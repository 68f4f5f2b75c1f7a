#include "mpep/river.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mpep/lift.hpp"
#include "mpep/stable_mesh.hpp"

namespace mpep {

namespace {

// Polar angle of (x, y) accumulated along the dense path over [ta, tb],
// unwrapped through the trajectory nodes.
double swept_angle(const Trajectory<10>& path, double ta, double tb) {
  const Vec<10> sa = path.state_at(ta);
  double prev = std::atan2(sa[1], sa[0]);
  double total = 0.0;
  for (std::size_t i = 0; i < path.node_t.size(); ++i) {
    const double t = path.node_t[i];
    if (t <= ta || t > tb) continue;
    const double a = std::atan2(path.node_y[i][1], path.node_y[i][0]);
    total += angle_diff(a, prev);
    prev = a;
  }
  const Vec<10> sb = path.state_at(tb);
  total += angle_diff(std::atan2(sb[1], sb[0]), prev);
  return total;
}

// Snaps a crossing state onto the exit torus: (x, y) moves to the orbit
// point at the projection's interpolated time, (p, q) re-projects onto the
// zero-energy circle of the new base point.
Vec4 snap_to_torus(const DriftField& field, const PeriodicOrbit& orbit,
                   const Vec4& state, const PeriodicOrbit::Projection& pr) {
  const std::size_t n = orbit.size();
  const std::size_t k = pr.edge;
  const Vec2& a = orbit.points[k];
  const Vec2& b = orbit.points[(k + 1) % n];
  const double len = norm(b - a);
  const double u = len > 0.0 ? norm(pr.point - a) / len : 0.0;
  const double ta = orbit.tau[k];
  const double tb = (k + 1 == n) ? orbit.period : orbit.tau[k + 1];
  const Vec2 g = orbit.path.state_at(ta + u * (tb - ta));
  return project_to_zero_energy(field.derivs(g[0], g[1]),
                                Vec4{g[0], g[1], state[2], state[3]});
}

bool zero_maslov_exit(const DriftField& field,
                      const LocalUnstableManifold& wu,
                      const PeriodicOrbit& orbit, double theta,
                      const MaslovConfig& cfg) {
  const ConjugateRecord rec = conjugate_points(field, wu, orbit, theta, cfg);
  return rec.exited && rec.maslov_index == 0;
}

struct DirectVariation {
  double value = 0.0;
  double square = 0.0;
};

}  // namespace

RiverInterval find_river(const DriftField& field,
                         const LocalUnstableManifold& wu,
                         const PeriodicOrbit& orbit,
                         const std::vector<Heteroclinic>& hets,
                         const MaslovConfig& cfg) {
  if (hets.size() < 2)
    throw std::invalid_argument("find_river: need at least two banks");
  std::vector<double> angles;
  for (const auto& h : hets) angles.push_back(wrap_2pi(h.theta));
  std::sort(angles.begin(), angles.end());

  const std::size_t n = angles.size();
  const double r_cls =
      HeteroclinicConfig{}.classify_radius_factor * orbit.r_inside();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lo = angles[i], hi = angles[i + 1];
    // First-passage dichotomy: fall-back arcs re-exit eventually, so the
    // direct-exit test distinguishes the River from its neighbors.
    const auto mid =
        classify_escape(field, orbit, wu.k_point(0.5 * (lo + hi)), 60.0,
                        r_cls, cfg.integ);
    if (mid.cls != EscapeClass::exits) continue;
    const double probe = std::min(0.05, 0.25 * (hi - lo));
    const bool lo_zero = zero_maslov_exit(field, wu, orbit, lo + probe, cfg);
    const bool hi_zero = zero_maslov_exit(field, wu, orbit, hi - probe, cfg);
    if (lo_zero == hi_zero)
      throw std::runtime_error("find_river: ambiguous bank orientation");
    RiverInterval river;
    river.theta1 = hi_zero ? hi : lo;
    river.theta2 = hi_zero ? lo : hi;
    return river;
  }
  throw std::runtime_error("find_river: no non-wrapping exit arc");
}

std::optional<ExitPoint> transition_map(const DriftField& field,
                                        const LocalUnstableManifold& wu,
                                        const PeriodicOrbit& orbit,
                                        double theta,
                                        const MaslovConfig& cfg) {
  const ConjugateRecord rec = conjugate_points(field, wu, orbit, theta, cfg);
  if (!rec.exited) return std::nullopt;

  ExitPoint ep;
  ep.theta = theta;
  ep.raw = rec.end_state;
  const auto pr = orbit.project(ep.raw[0], ep.raw[1]);
  ep.state = snap_to_torus(field, orbit, ep.raw, pr);
  ep.s = pr.s;
  ep.t_exit = rec.t_end - rec.t_k;
  ep.angle_swept = swept_angle(rec.path, rec.t_k, rec.t_end);
  ep.winding = static_cast<int>(std::abs(ep.angle_swept) / (2.0 * M_PI));
  ep.maslov_index = rec.maslov_index;
  ep.flagged = rec.flagged;
  return ep;
}

Pivot pivot_theta(const DriftField& field, const LocalUnstableManifold& wu,
                  const PeriodicOrbit& orbit, const RiverInterval& river,
                  const PivotConfig& cfg) {
  const double lo = river.lo(), hi = river.hi();
  const int n = cfg.seed_samples;
  if (n < 2) throw std::invalid_argument("pivot_theta: grid too small");

  auto pred = [&](double th) {
    return zero_maslov_exit(field, wu, orbit, th, cfg.maslov);
  };

  Pivot piv;
  std::vector<double> grid(n);
  std::vector<char> val(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * (i + 1) / (n + 1);
    val[i] = pred(grid[i]);
  }
  for (int i = 0; i + 1 < n; ++i)
    if (val[i] != val[i + 1])
      piv.brackets.push_back({grid[i], grid[i + 1]});
  if (piv.brackets.empty())
    throw std::runtime_error("pivot_theta: predicate has no flip on grid");

  // The infimum-side bracket: the first flip into the zero-Maslov set.
  double blo = 0.0, bhi = 0.0;
  bool found = false;
  for (int i = 0; i + 1 < n; ++i)
    if (!val[i] && val[i + 1]) {
      blo = grid[i];
      bhi = grid[i + 1];
      found = true;
      break;
    }
  if (!found)
    throw std::runtime_error("pivot_theta: no entry flip on grid");

  while (bhi - blo > cfg.dtheta_tol) {
    const double mid = 0.5 * (blo + bhi);
    (pred(mid) ? bhi : blo) = mid;
  }
  piv.theta_hat = 0.5 * (blo + bhi);

  const auto side = conjugate_points(field, wu, orbit, blo, cfg.maslov);
  if (!side.exited || side.points.empty())
    throw std::runtime_error("pivot_theta: index-1 side lost its zero");
  piv.tau_conj = side.points.front().tau;
  piv.tau_exit = side.t_end - side.t_k;

  const auto ep = transition_map(field, wu, orbit, piv.theta_hat, cfg.maslov);
  if (!ep) throw std::runtime_error("pivot_theta: pivot does not exit");
  piv.exit = *ep;
  return piv;
}

std::vector<ExitPoint> mouth_of_river(const DriftField& field,
                                      const LocalUnstableManifold& wu,
                                      const PeriodicOrbit& orbit,
                                      const RiverInterval& river,
                                      const Pivot& pivot,
                                      const MouthConfig& cfg) {
  const double a = pivot.theta_hat;
  const double b = river.theta1;
  const double dir = (b > a) ? 1.0 : -1.0;
  const double w = std::abs(b - a);

  // Uniform-in-theta steps cross ~pitch/(bank distance) arc units each, so
  // hand over to geometric spacing once that exceeds the spiral pitch.
  const double d_switch = 0.25 * w;

  std::vector<double> offsets;  // distance from theta_hat toward the bank
  for (int i = 0; i < cfg.uniform_samples; ++i)
    offsets.push_back((w - d_switch) * (i + 1) /
                      static_cast<double>(cfg.uniform_samples));
  double d = d_switch;
  for (int k = 0; k < cfg.refine_steps; ++k) {
    d *= cfg.refine_ratio;
    offsets.push_back(w - d);
  }
  std::sort(offsets.begin(), offsets.end());

  struct Sample {
    double off;
    std::optional<ExitPoint> ep;
  };
  std::vector<Sample> samples;
  for (double off : offsets)
    samples.push_back(
        {off, transition_map(field, wu, orbit, a + dir * off, cfg.maslov)});

  // The local pitch ds/d(ln distance) follows the orbit's arc speed, which
  // is far from uniform, so split pairs in log bank distance until adjacent
  // exits are within cover_gap along Gamma.
  const double arc = orbit.total_arc();
  int budget = cfg.refine_budget;
  std::size_t i = 1;
  while (i < samples.size()) {
    const Sample& l = samples[i - 1];
    const Sample& r = samples[i];
    bool split = false;
    if (l.ep && r.ep && budget > 0) {
      double g = std::abs(r.ep->s - l.ep->s);
      g = std::min(g, arc - g);
      split = g > cfg.cover_gap;
    }
    const double dmid = std::sqrt((w - l.off) * (w - r.off));
    if (!split || !(dmid < w - l.off && dmid > w - r.off)) {
      ++i;
      continue;
    }
    samples.insert(
        samples.begin() + i,
        {w - dmid,
         transition_map(field, wu, orbit, a + dir * (w - dmid), cfg.maslov)});
    --budget;
  }

  std::vector<ExitPoint> mouth;
  for (const Sample& s : samples)
    if (s.ep) mouth.push_back(*s.ep);
  return mouth;
}

SecondVariation second_variation_check(const DriftField& field,
                                       const LocalUnstableManifold& wu,
                                       const PeriodicOrbit& orbit,
                                       double theta, int probes,
                                       std::uint64_t seed,
                                       const MaslovConfig& cfg) {
  // Joint system: lift state plus the two frame columns of V.
  auto rhs = [&](double, const Vec<12>& s, Vec<12>& ds) {
    const Vec4 z{s[0], s[1], s[2], s[3]};
    const Vec4 f = lift_rhs(field, z);
    const Mat4 a = lift_linearization(field, z).a;
    for (int i = 0; i < 4; ++i) ds[i] = f[i];
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 4; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += a[i * 4 + j] * s[4 + 4 * c + j];
        ds[4 + 4 * c + i] = acc;
      }
  };
  auto renorm = [&](double, Vec<12>& s) {
    double n = 0.0;
    for (int i = 4; i < 12; ++i) n += s[i] * s[i];
    n = std::sqrt(n);
    if (n > 1e6)
      for (int i = 4; i < 12; ++i) s[i] /= n;
  };
  std::vector<EventSpec<12>> evs;
  evs.push_back({[&orbit](double, const Vec<12>& s) {
                   return orbit.radial_gap(s[0], s[1]);
                 },
                 EventDirection::rising, true});
  evs.push_back({[&](double, const Vec<12>& s) {
                   return orbit_distance_4d(orbit,
                                            Vec4{s[0], s[1], s[2], s[3]}) -
                          cfg.arrive_distance;
                 },
                 EventDirection::falling, true});

  const Vec4 z0 = wu.inner_point(theta, cfg.inner_distance);

  const auto& a10 = wu.alpha[LocalUnstableManifold::index(1, 0)];
  Vec<12> y0{};
  for (int i = 0; i < 4; ++i) {
    y0[i] = z0[i];
    y0[4 + i] = a10[i].real();
    y0[8 + i] = a10[i].imag();
  }
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = true;
  const auto path =
      integrate<12>(rhs, y0, 0.0, cfg.max_time, ic, evs, renorm);

  SecondVariation sv;
  if (!path.first_hit(0)) return sv;  // no exit: certificate not applicable

  auto frame = [&](const Vec<12>& s, Mat2& v1, Mat2& v2) {
    v1 = Mat2{s[4], s[8], s[5], s[9]};
    v2 = Mat2{s[6], s[10], s[7], s[11]};
  };

  double prev_det = 0.0;
  bool singular = false;
  for (std::size_t i = 0; i < path.node_t.size(); ++i) {
    Mat2 v1, v2;
    frame(path.node_y[i], v1, v2);
    const double dv = det2(v1);
    if (i > 0 && dv * prev_det <= 0.0) singular = true;
    prev_det = dv;
    // Condition number from singular values of the 2x2 block.
    const double g11 = v1[0] * v1[0] + v1[2] * v1[2];
    const double g22 = v1[1] * v1[1] + v1[3] * v1[3];
    const double g12 = v1[0] * v1[1] + v1[2] * v1[3];
    const double tr = g11 + g22;
    const double disc =
        std::sqrt(std::max(0.0, 0.25 * (g11 - g22) * (g11 - g22) + g12 * g12));
    const double smax = std::sqrt(0.5 * tr + disc);
    const double smin = std::sqrt(std::max(0.0, 0.5 * tr - disc));
    const double cond = smin > 0.0 ? smax / smin : 1e300;
    sv.v1_max_cond = std::max(sv.v1_max_cond, cond);

    const Mat2 w = matmul<2>(Mat2{-v2[0], -v2[1], -v2[2], -v2[3]},
                             inverse2(v1));
    const double wn = std::hypot(std::hypot(w[0], w[1]),
                                 std::hypot(w[2], w[3]));
    if (wn > 0.0)
      sv.symmetry_defect =
          std::max(sv.symmetry_defect, std::abs(w[1] - w[2]) / wn);
  }
  if (singular || sv.v1_max_cond > 1e10) return sv;  // refused

  // Second variation on compactly supported sine-packet perturbations,
  // evaluated through both the direct quadratic form and the completed
  // square; agreement is the Riccati cross-check.
  const double ta = path.t_start();
  const double tb = path.t_final();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  constexpr int modes = 4;
  constexpr int quad_n = 4000;  // Simpson panels

  sv.min_probe = 0.0;
  sv.probes.reserve(probes);
  for (int p = 0; p < probes; ++p) {
    // The first probe is the zero perturbation, whose variation vanishes.
    std::array<double, 2 * modes> amp{};
    if (p > 0)
      for (auto& c : amp) c = unif(rng);

    auto h_of = [&](double t, Vec2& h, Vec2& hdot) {
      const double u = (t - ta) / (tb - ta);
      h = Vec2{0.0, 0.0};
      hdot = Vec2{0.0, 0.0};
      for (int m = 1; m <= modes; ++m) {
        const double w = m * M_PI;
        const double sn = std::sin(w * u), cs = std::cos(w * u);
        h[0] += amp[m - 1] * sn;
        h[1] += amp[modes + m - 1] * sn;
        hdot[0] += amp[m - 1] * w * cs / (tb - ta);
        hdot[1] += amp[modes + m - 1] * w * cs / (tb - ta);
      }
    };

    auto integrand = [&](double t) {
      const Vec<12> s = path.state_at(t);
      const auto d = field.derivs(s[0], s[1]);
      const Mat2 bm{d.fx, d.fy, d.gx, d.gy};
      const Mat2 am{d.fxx * s[2] + d.gxx * s[3], d.fxy * s[2] + d.gxy * s[3],
                    d.fxy * s[2] + d.gxy * s[3], d.fyy * s[2] + d.gyy * s[3]};
      Mat2 v1, v2;
      frame(s, v1, v2);
      const Mat2 w = matmul<2>(Mat2{-v2[0], -v2[1], -v2[2], -v2[3]},
                               inverse2(v1));
      Vec2 h, hd;
      h_of(t, h, hd);

      const Vec2 bh = matvec(bm, h);
      const Vec2 btb_a_h =
          matvec(transpose<2>(bm), bh) - matvec(am, h);
      DirectVariation out;
      out.value = dot(h, btb_a_h) - dot(h, matvec(transpose<2>(bm), hd)) -
                  dot(hd, bh) + dot(hd, hd);
      const Vec2 r = matvec(bm, h) - matvec(w, h) - hd;
      out.square = dot(r, r);
      return out;
    };

    double direct = 0.0, square = 0.0;
    const double dh = (tb - ta) / quad_n;
    for (int i = 0; i <= quad_n; ++i) {
      const double weight =
          (i == 0 || i == quad_n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const DirectVariation v = integrand(ta + i * dh);
      direct += weight * v.value;
      square += weight * v.square;
    }
    direct *= dh / 3.0;
    square *= dh / 3.0;

    sv.probes.push_back(square);
    if (p == 0 || square < sv.min_probe) sv.min_probe = square;
    const double scale = std::max({std::abs(direct), std::abs(square), 1e-12});
    sv.form_gap = std::max(sv.form_gap, std::abs(direct - square) / scale);
  }
  sv.granted = sv.min_probe >= 0.0;
  return sv;
}

}  // namespace mpep
