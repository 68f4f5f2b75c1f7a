#include "mpep/heteroclinics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpep/lift.hpp"

namespace mpep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// omega = dp ^ dx + dq ^ dy.
double symplectic_form(const Vec4& u, const Vec4& v) {
  return u[2] * v[0] - u[0] * v[2] + u[3] * v[1] - u[1] * v[3];
}

struct ProfilePoint {
  double dist = kInf;
  double t = 0.0;
  Vec4 pt{};
  MeshQuery q;
};

// Distance of the first-approach piece of the W^u trajectory at angle theta
// to the stable mesh, with the witnessing points.
ProfilePoint wu_mesh_profile(const DriftField& field,
                             const LocalUnstableManifold& wu,
                             const StableMesh& mesh, const PeriodicOrbit& orbit,
                             double theta, const HeteroclinicConfig& cfg) {
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  const double r_in = cfg.inner_radius_factor * orbit.r_inside();
  std::vector<EventSpec<4>> evs;
  evs.push_back({[&orbit](double, const Vec4& y) {
                   return orbit.radial_gap(y[0], y[1]);
                 },
                 EventDirection::rising, true});
  evs.push_back({[r_in](double, const Vec4& y) {
                   return r_in - std::hypot(y[0], y[1]);
                 },
                 EventDirection::rising, true});
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = false;
  const auto traj =
      integrate<4>(rhs, wu.k_point(theta), 0.0, cfg.horizon, ic, evs);
  ProfilePoint best;
  for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
    const auto q = mesh.nearest(traj.node_y[i]);
    if (q.found() && q.dist < best.dist) {
      best.dist = q.dist;
      best.t = traj.node_t[i];
      best.pt = traj.node_y[i];
      best.q = q;
    }
  }
  return best;
}

}  // namespace

ExitTorus build_exit_torus(const DriftField& field,
                           const PeriodicOrbit& orbit) {
  ExitTorus torus;
  torus.base = orbit.points;
  torus.center.resize(orbit.size());
  torus.radius.resize(orbit.size());
  for (std::size_t k = 0; k < orbit.size(); ++k) {
    const DriftDerivs d = field.derivs(orbit.points[k][0], orbit.points[k][1]);
    torus.center[k] = Vec2{-d.f, -d.g};
    torus.radius[k] = std::hypot(d.f, d.g);
  }
  return torus;
}

TorusSection torus_section(const DriftField& field,
                           const LocalUnstableManifold& wu, double rho,
                           int samples, const IntegratorConfig& integ) {
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  const std::vector<EventSpec<4>> evs{
      {[rho](double, const Vec4& y) { return std::hypot(y[0], y[1]) - rho; },
       EventDirection::rising, true}};
  IntegratorConfig ic = integ;
  ic.store_dense = false;

  TorusSection sec;
  for (int j = 0; j <= samples; ++j) {
    const double th = 2.0 * M_PI * j / samples;
    const Vec4 k0 = wu.k_point(th);
    if (std::hypot(k0[0], k0[1]) >= rho)
      throw std::invalid_argument("torus_section: rho inside the K circle");
    const auto traj = integrate<4>(rhs, k0, 0.0, 100.0, ic, evs);
    const EventHit<4>* hit = traj.first_hit(0);
    if (!hit) throw std::runtime_error("torus_section: no crossing found");
    const Vec4& y = hit->y;
    const DriftDerivs d = field.derivs(y[0], y[1]);
    double a = std::atan2(y[1], y[0]);
    // Poloidal angle relative to the marked fiber point p = q = 0 (the
    // deterministic plane), which the section never touches.
    const double ux = y[2] + d.f, uy = y[3] + d.g;
    double b = std::atan2(d.f * uy - d.g * ux, d.f * ux + d.g * uy);
    if (!sec.alpha.empty()) {
      a = sec.alpha.back() + angle_diff(a, sec.alpha.back());
      b = sec.beta.back() + angle_diff(b, sec.beta.back());
    }
    sec.theta.push_back(th);
    sec.alpha.push_back(a);
    sec.beta.push_back(b);
  }
  sec.toroidal_winding = (sec.alpha.back() - sec.alpha.front()) / (2.0 * M_PI);
  sec.poloidal_winding = (sec.beta.back() - sec.beta.front()) / (2.0 * M_PI);
  return sec;
}

EscapeProbe classify_escape(const DriftField& field, const PeriodicOrbit& orbit,
                            const Vec4& start, double horizon,
                            double inner_radius,
                            const IntegratorConfig& integ) {
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  std::vector<EventSpec<4>> evs;
  evs.push_back({[&orbit](double, const Vec4& y) {
                   return orbit.radial_gap(y[0], y[1]);
                 },
                 EventDirection::rising, true});
  evs.push_back({[inner_radius](double, const Vec4& y) {
                   return inner_radius - std::hypot(y[0], y[1]);
                 },
                 EventDirection::rising, true});
  IntegratorConfig ic = integ;
  ic.store_dense = false;
  const auto traj = integrate<4>(rhs, start, 0.0, horizon, ic, evs);

  EscapeProbe p;
  p.t_end = traj.t_final();
  p.end_state = traj.final_state();
  if (traj.first_hit(0))
    p.cls = EscapeClass::exits;
  else if (traj.first_hit(1))
    p.cls = EscapeClass::returns;
  p.d_gamma = kInf;
  for (std::size_t i = 0; i < traj.node_y.size(); ++i) {
    const Vec4& y = traj.node_y[i];
    if (orbit.radial_gap(y[0], y[1]) < -0.8) continue;
    const double d = orbit_distance_4d(orbit, y);
    if (d < p.d_gamma) {
      p.d_gamma = d;
      p.t_close = traj.node_t[i];
    }
  }
  return p;
}

std::vector<Candidate> coarse_intersections(const DriftField& field,
                                            const LocalUnstableManifold& wu,
                                            const StableMesh& mesh,
                                            const PeriodicOrbit& orbit,
                                            const HeteroclinicConfig& cfg) {
  const int n = cfg.coarse_samples;
  auto profile = [&](double th) {
    return wu_mesh_profile(field, wu, mesh, orbit, th, cfg);
  };

  std::vector<double> m(n);
  for (int j = 0; j < n; ++j) m[j] = profile(2.0 * M_PI * j / n).dist;

  std::vector<Candidate> found;
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int j = 0; j < n; ++j) {
    if (!(m[j] <= m[(j + n - 1) % n] && m[j] < m[(j + 1) % n])) continue;
    double a = 2.0 * M_PI * (j - 1) / n, b = 2.0 * M_PI * (j + 1) / n;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = profile(c).dist, fd = profile(d).dist;
    for (int it = 0; it < 28; ++it) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = profile(c).dist;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = profile(d).dist;
      }
    }
    const double th = 0.5 * (a + b);
    const ProfilePoint p = profile(th);
    if (p.dist >= cfg.threshold) continue;
    Candidate cand;
    cand.theta = wrap_2pi(th);
    cand.dist = p.dist;
    cand.t_wu = p.t;
    cand.wu_point = p.pt;
    cand.witness = p.q;
    cand.strip_tau = mesh.strips[p.q.strip].tau;
    found.push_back(cand);
  }

  // Merge candidates closer than cluster_dtheta (cyclically), keeping the
  // best witness of each cluster.
  std::sort(found.begin(), found.end(),
            [](const Candidate& x, const Candidate& y) {
              return x.theta < y.theta;
            });
  std::vector<Candidate> merged;
  for (const Candidate& cand : found) {
    if (!merged.empty() &&
        std::abs(angle_diff(cand.theta, merged.back().theta)) <
            cfg.cluster_dtheta) {
      if (cand.dist < merged.back().dist) merged.back() = cand;
    } else {
      merged.push_back(cand);
    }
  }
  if (merged.size() > 1 &&
      std::abs(angle_diff(merged.front().theta, merged.back().theta)) <
          cfg.cluster_dtheta) {
    if (merged.back().dist < merged.front().dist)
      merged.front() = merged.back();
    merged.pop_back();
  }
  return merged;
}

Heteroclinic refine_heteroclinic(const DriftField& field,
                                 const LocalUnstableManifold& wu,
                                 const PeriodicOrbit& orbit, double theta_guess,
                                 const HeteroclinicConfig& cfg) {
  const double r_in = cfg.classify_radius_factor * orbit.r_inside();
  auto classify = [&](double th) {
    return classify_escape(field, orbit, wu.k_point(th), cfg.horizon, r_in,
                           cfg.integ);
  };

  double lo = 0.0, hi = 0.0;
  EscapeClass lo_cls = EscapeClass::undecided;
  for (double delta : {1e-3, 3e-3, 1e-2, 3e-2}) {
    const EscapeClass ca = classify(theta_guess - delta).cls;
    const EscapeClass cb = classify(theta_guess + delta).cls;
    if (ca != cb && ca != EscapeClass::undecided &&
        cb != EscapeClass::undecided) {
      lo = theta_guess - delta;
      hi = theta_guess + delta;
      lo_cls = ca;
      break;
    }
  }
  if (lo_cls == EscapeClass::undecided)
    throw std::runtime_error(
        "refine_heteroclinic: no exit/return sign change near the guess");

  while (hi - lo > cfg.refine_dtheta) {
    const double mid = 0.5 * (lo + hi);
    const EscapeClass cm = classify(mid).cls;
    if (cm == EscapeClass::undecided)
      throw std::runtime_error("refine_heteroclinic: undecided classification");
    if (cm == lo_cls)
      lo = mid;
    else
      hi = mid;
  }

  Heteroclinic het;
  het.theta = wrap_2pi(0.5 * (lo + hi));
  het.exit_side = (lo_cls == EscapeClass::exits) ? -1.0 : 1.0;

  // Backward certification via the conjugacy: flowing K(theta) backward by
  // t0 lands on P(s0 e^{i theta}) (checked as the handoff residual), and the
  // remaining backward time starts from the series point, whose truncation
  // error does not feed the backward-unstable directions.
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = false;
  const double s0 = cfg.handoff_radius;
  const double t0 = std::log(1.0 / s0) / wu.mu1.real();
  const Vec4 deep =
      wu.eval(std::exp(-wu.mu1 * t0) * std::polar(1.0, het.theta));
  const auto hand = integrate<4>(rhs, wu.k_point(het.theta), 0.0, -t0, ic);
  het.d_handoff = norm(hand.final_state() - deep);
  const auto back = integrate<4>(rhs, deep, 0.0, -(cfg.t_backward - t0), ic);
  het.d_o = norm(back.final_state());

  const EscapeProbe fw = classify(het.theta);
  het.d_gamma = fw.d_gamma;
  het.t_close = fw.t_close;
  het.certified = het.d_o <= cfg.d_o_tol && het.d_handoff <= cfg.d_o_tol &&
                  het.d_gamma <= cfg.d_gamma_tol;
  return het;
}

TransversalityReport transversality_check(const DriftField& field,
                                          const LocalUnstableManifold& wu,
                                          const StableMesh& mesh,
                                          const PeriodicOrbit& orbit,
                                          const Heteroclinic& het,
                                          double flow_offset,
                                          const HeteroclinicConfig& cfg) {
  // Transport the K tangent along the refined trajectory to the witness.
  auto rhs8 = [&](double, const Vec<8>& s, Vec<8>& ds) {
    const Vec4 x{s[0], s[1], s[2], s[3]};
    const Vec4 f = lift_rhs(field, x);
    const LiftLinearization lin = lift_linearization(field, x);
    for (int i = 0; i < 4; ++i) {
      ds[i] = f[i];
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) acc += lin.a[i * 4 + j] * s[4 + j];
      ds[4 + i] = acc;
    }
  };
  const Vec4 k0 = wu.k_point(het.theta);
  const Vec4 v0 = wu.k_tangent(het.theta);
  Vec<8> s0{k0[0], k0[1], k0[2], k0[3], v0[0], v0[1], v0[2], v0[3]};
  const double t_mid = het.witness.t_wu + flow_offset;
  IntegratorConfig ic = cfg.integ;
  ic.store_dense = false;
  const auto traj = integrate<8>(rhs8, s0, 0.0, t_mid, ic);
  if (!traj.reached_end())
    throw std::runtime_error("transversality_check: transport failed");
  const Vec<8>& se = traj.final_state();
  const Vec4 phi{se[0], se[1], se[2], se[3]};
  const Vec4 v{se[4], se[5], se[6], se[7]};
  const Vec4 fu = lift_rhs(field, phi);

  // Stable tangent plane: near Gamma the plane is spanned by the flow and
  // the stable bundle direction, so transport {F, xi_s} backward from the
  // witnessing strip's seed to the witness time.
  const MeshQuery q = mesh.nearest(phi);
  if (!q.found())
    throw std::runtime_error("transversality_check: witness left the mesh");
  const StableStrip& strip = mesh.strips[q.strip];
  const double tw = strip.times[q.seg] +
                    q.u * (strip.times[q.seg + 1] - strip.times[q.seg]);
  const Vec4& xi = orbit.stable_dirs[strip.seed_index];
  Vec<8> w0{strip.seed[0], strip.seed[1], strip.seed[2], strip.seed[3],
            xi[0],         xi[1],         xi[2],         xi[3]};
  const auto wtraj = integrate<8>(rhs8, w0, 0.0, tw, ic);
  if (!wtraj.reached_end())
    throw std::runtime_error("transversality_check: stable transport failed");
  const Vec<8>& we = wtraj.final_state();
  const Vec4 psi{we[0], we[1], we[2], we[3]};
  const Vec4 across{we[4], we[5], we[6], we[7]};
  const Vec4 along = lift_rhs(field, psi);

  auto orthonormal = [](const Vec4& a, const Vec4& b) {
    Eigen::Matrix<double, 4, 2> m;
    const double na = norm(a);
    for (int i = 0; i < 4; ++i) m(i, 0) = a[i] / na;
    Vec4 b2 = b;
    double proj = 0.0;
    for (int i = 0; i < 4; ++i) proj += m(i, 0) * b[i];
    for (int i = 0; i < 4; ++i) b2[i] -= proj * m(i, 0);
    const double nb = norm(b2);
    for (int i = 0; i < 4; ++i) m(i, 1) = b2[i] / nb;
    return m;
  };
  const auto qu = orthonormal(fu, v);
  const auto qs = orthonormal(along, across);

  Eigen::Matrix2d mm = qu.transpose() * qs;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(mm);
  const double s1 = std::min(1.0, svd.singularValues()[0]);
  const double s2 = std::min(1.0, svd.singularValues()[1]);

  TransversalityReport rep;
  rep.flow_angle = std::acos(s1);
  rep.angle = std::acos(s2);
  rep.omega_u = symplectic_form(fu, v) / (norm(fu) * norm(v));
  rep.omega_s =
      symplectic_form(along, across) / (norm(along) * norm(across));
  return rep;
}

std::vector<Heteroclinic> find_heteroclinics(const DriftField& field,
                                             const LocalUnstableManifold& wu,
                                             const StableMesh& mesh,
                                             const PeriodicOrbit& orbit,
                                             const HeteroclinicConfig& cfg) {
  const auto cands = coarse_intersections(field, wu, mesh, orbit, cfg);
  std::vector<Heteroclinic> hets;
  for (const Candidate& cand : cands) {
    Heteroclinic het = refine_heteroclinic(field, wu, orbit, cand.theta, cfg);
    het.witness = cand;
    het.transversality =
        transversality_check(field, wu, mesh, orbit, het, 0.0, cfg).angle;
    hets.push_back(het);
  }
  std::sort(hets.begin(), hets.end(),
            [](const Heteroclinic& a, const Heteroclinic& b) {
              return a.theta < b.theta;
            });
  return hets;
}

}  // namespace mpep
