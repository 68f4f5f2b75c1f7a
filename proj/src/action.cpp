#include "mpep/action.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mpep/lift.hpp"

namespace mpep {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 7-point Gauss-Legendre rule on [-1, 1], exact through degree 13; the
// quartic dense interpolant makes every window integrand a polynomial of
// degree at most 8 except the angle rate, which is smooth enough for the
// rule to track far below the integrator tolerance.
constexpr double kGlNode[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
    0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGlWeight[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

struct WindowSums {
  double s = 0.0;
  double c = 0.0;
  double angle = 0.0;
  double max_h = 0.0;
};

WindowSums window_quadrature(const DriftField& field,
                             const Trajectory<4>& path, double t0, double t1) {
  if (path.segments.empty())
    throw std::logic_error("action quadrature: trajectory has no dense segments");
  if (!(t0 <= t1) || t0 < path.t_start() - 1e-9 || t1 > path.t_final() + 1e-9)
    throw std::out_of_range("action quadrature: window outside trajectory span");
  WindowSums out;
  for (const auto& seg : path.segments) {
    const double a = std::max(t0, seg.t0);
    const double b = std::min(t1, seg.t0 + seg.span);
    if (b <= a) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int k = 0; k < 7; ++k) {
      const Vec4 z = seg.eval(mid + half * kGlNode[k]);
      const double w = half * kGlWeight[k];
      out.s += w * 0.5 * (z[2] * z[2] + z[3] * z[3]);
      out.c += w * field.divergence(z[0], z[1]);
      const Vec4 f = lift_rhs(field, z);
      out.angle +=
          w * (z[0] * f[1] - z[1] * f[0]) / (z[0] * z[0] + z[1] * z[1]);
      out.max_h = std::max(out.max_h, std::abs(hamiltonian(field, z)));
    }
  }
  return out;
}

double wrap_pi(double x) {
  double r = std::fmod(x + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r - kPi;
}

}  // namespace

ActionLeg action_leg(const DriftField& field, const LocalUnstableManifold& wu,
                     const PeriodicOrbit& orbit, double theta,
                     const ActionConfig& cfg) {
  ActionLeg leg;
  leg.theta = theta;
  if (!(cfg.r0 > 2.0 * cfg.inner_distance))
    throw std::invalid_argument("action_leg: r0 must exceed twice the launch distance");
  // The truncation time comes from the linearizing conjugacy, not from an
  // integration event: the planar radius is an eccentric spiral whose
  // level-crossing phase slips by O(1) time as theta varies, which would
  // print a sawtooth onto C.
  double t_inner = 0.0, t_trunc = 0.0;
  const Vec4 z0 = wu.inner_point(theta, cfg.inner_distance, &t_inner);
  wu.inner_point(theta, cfg.r0, &t_trunc);
  leg.t_start = t_inner - t_trunc;

  auto rhs = [&](double, const Vec4& z, Vec4& dz) { dz = lift_rhs(field, z); };
  std::vector<EventSpec<4>> evs;
  if (cfg.border_distance == 0.0)
    evs.push_back({[&orbit](double, const Vec4& z) {
                     return orbit.radial_gap(z[0], z[1]);
                   },
                   EventDirection::rising, true});
  else
    evs.push_back({[&](double, const Vec4& z) {
                     return orbit.distance(z[0], z[1]) - cfg.border_distance;
                   },
                   EventDirection::falling, true});

  IntegratorConfig ic = cfg.integ;
  ic.store_dense = true;
  leg.path = integrate<4>(rhs, z0, 0.0, cfg.max_time, ic, evs);

  leg.t_end = leg.path.t_final();
  leg.exited = leg.path.first_hit(0) != nullptr;
  leg.end_state = leg.path.final_state();

  const WindowSums main = window_quadrature(field, leg.path, leg.t_start,
                                            leg.t_end);
  const WindowSums tail = window_quadrature(field, leg.path, 0.0, leg.t_start);
  leg.s_action = main.s;
  leg.om_c = main.c;
  leg.angle_swept = main.angle;
  leg.s_tail = tail.s;
  leg.h_drift = std::max(main.max_h, tail.max_h);
  return leg;
}

double fw_action(const DriftField& field, const Trajectory<4>& path, double t0,
                 double t1, double* max_h) {
  const WindowSums w = window_quadrature(field, path, t0, t1);
  if (max_h) *max_h = w.max_h;
  return w.s;
}

double om_correction(const DriftField& field, const Trajectory<4>& path,
                     double t0, double t1, double r0) {
  if (norm(path.state_at(t0)) < 0.5 * r0)
    throw std::domain_error(
        "om_correction: window starts inside the r0/2 ball");
  return window_quadrature(field, path, t0, t1).c;
}

std::vector<double> profile_grid(const RiverInterval& river, int uniform_n,
                                 int tail_steps, double tail_ratio,
                                 double tail_start) {
  if (uniform_n < 2 || tail_steps < 0 || tail_ratio <= 0.0 ||
      tail_ratio >= 1.0 || tail_start <= 0.0 ||
      tail_start >= 0.5 * river.width())
    throw std::invalid_argument("profile_grid: bad grid shape");
  const double dir = river.theta1 > river.theta2 ? 1.0 : -1.0;
  const double inset = 1e-3 * river.width();
  const double from = river.theta2 + dir * inset;
  const double to = river.theta1 - dir * tail_start;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(uniform_n + tail_steps));
  for (int i = 0; i < uniform_n; ++i)
    g.push_back(from + (to - from) * i / (uniform_n - 1));
  double off = tail_start;
  for (int k = 0; k < tail_steps; ++k) {
    off *= tail_ratio;
    g.push_back(river.theta1 - dir * off);
  }
  std::sort(g.begin(), g.end());
  return g;
}

ActionProfile action_profile(const DriftField& field,
                             const LocalUnstableManifold& wu,
                             const PeriodicOrbit& orbit,
                             const RiverInterval& river,
                             const std::vector<double>& thetas, double eps,
                             const ActionConfig& cfg) {
  ActionProfile pr;
  pr.eps = eps;
  pr.r0 = cfg.r0;
  pr.border_distance = cfg.border_distance;
  pr.theta1 = river.theta1;
  pr.theta2 = river.theta2;
  pr.theta = thetas;
  const std::size_t n = thetas.size();
  pr.s.resize(n);
  pr.c.resize(n);
  pr.total.resize(n);
  pr.angle.resize(n);
  pr.valid.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const ActionLeg leg = action_leg(field, wu, orbit, thetas[i], cfg);
    pr.s[i] = leg.s_action;
    pr.c[i] = leg.om_c;
    pr.total[i] = leg.s_action + eps * leg.om_c;
    pr.angle[i] = leg.angle_swept;
    pr.valid[i] = leg.exited ? 1 : 0;
  }
  return pr;
}

std::vector<std::size_t> s_monotone_violations(const ActionProfile& profile,
                                               double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < profile.theta.size(); ++i)
    if (profile.valid[i] && profile.theta[i] > lo && profile.theta[i] < hi)
      idx.push_back(i);
  std::vector<std::size_t> bad;
  if (idx.size() < 2) return bad;
  // Order steps toward theta1, where S must keep strictly decreasing.
  const bool ascending = profile.theta1 > profile.theta2;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const std::size_t a = ascending ? idx[k] : idx[idx.size() - 1 - k];
    const std::size_t b = ascending ? idx[k + 1] : idx[idx.size() - 2 - k];
    if (profile.s[b] >= profile.s[a]) bad.push_back(b);
  }
  return bad;
}

namespace {

// Golden-section refinement of the profile total around a bracketing grid
// triple, evaluating fresh legs.
std::array<double, 2> golden_refine(const DriftField& field,
                                    const LocalUnstableManifold& wu,
                                    const PeriodicOrbit& orbit, double eps,
                                    double lo, double hi,
                                    const ActionConfig& cfg) {
  auto value = [&](double th) {
    const ActionLeg leg = action_leg(field, wu, orbit, th, cfg);
    if (!leg.exited)
      throw std::runtime_error("om_minimizer: probe leg failed to exit");
    return leg.s_action + eps * leg.om_c;
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 200 && b - a > 1e-6; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value(x2);
    }
  }
  return f1 < f2 ? std::array<double, 2>{x1, f1}
                 : std::array<double, 2>{x2, f2};
}

struct GridSelection {
  double theta_min = 0.0;
  double total = 0.0;
  bool boundary = false;
  std::vector<std::array<double, 2>> local_minima;
};

GridSelection select_minimum(const DriftField& field,
                             const LocalUnstableManifold& wu,
                             const PeriodicOrbit& orbit,
                             const ActionProfile& profile, double eps,
                             double lo, double hi, const ActionConfig& cfg) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < profile.theta.size(); ++i)
    if (profile.valid[i] && profile.theta[i] > lo && profile.theta[i] < hi)
      idx.push_back(i);
  if (idx.size() < 3)
    throw std::runtime_error("om_minimizer: too few valid grid points in the window");

  std::size_t best = 0;
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (profile.total_at(idx[k], eps) < profile.total_at(idx[best], eps))
      best = k;

  GridSelection sel;
  sel.boundary = best == 0 || best == idx.size() - 1;
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    const double v = profile.total_at(idx[k], eps);
    if (v < profile.total_at(idx[k - 1], eps) &&
        v < profile.total_at(idx[k + 1], eps))
      sel.local_minima.push_back(golden_refine(
          field, wu, orbit, eps, profile.theta[idx[k - 1]],
          profile.theta[idx[k + 1]], cfg));
  }
  if (sel.boundary || sel.local_minima.empty()) {
    sel.theta_min = profile.theta[idx[best]];
    sel.total = profile.total_at(idx[best], eps);
    sel.boundary = true;
    return sel;
  }
  std::size_t arg = 0;
  for (std::size_t k = 1; k < sel.local_minima.size(); ++k)
    if (sel.local_minima[k][1] < sel.local_minima[arg][1]) arg = k;
  sel.theta_min = sel.local_minima[arg][0];
  sel.total = sel.local_minima[arg][1];
  return sel;
}

}  // namespace

OmSelection om_minimizer(const DriftField& field,
                         const LocalUnstableManifold& wu,
                         const PeriodicOrbit& orbit,
                         const ActionProfile& profile, double lo, double hi,
                         const ActionConfig& cfg) {
  const GridSelection sel = select_minimum(field, wu, orbit, profile,
                                           profile.eps, lo, hi, cfg);
  OmSelection out;
  out.theta_min = sel.theta_min;
  out.total = sel.total;
  out.boundary = sel.boundary;
  out.local_minima = sel.local_minima;
  out.trajectory = action_leg(field, wu, orbit, sel.theta_min, cfg);
  const Vec4& end = out.trajectory.end_state;
  const PeriodicOrbit::Projection pj = orbit.project(end[0], end[1]);
  out.om_s = pj.s;
  out.om_point = pj.point;
  return out;
}

JumpScan om_jump_scan(const DriftField& field, const LocalUnstableManifold& wu,
                      const PeriodicOrbit& orbit, const ActionProfile& profile,
                      const std::vector<double>& eps_grid, double lo,
                      double hi, double jump_tol, const ActionConfig& cfg) {
  JumpScan scan;
  scan.jump_tol = jump_tol;

  double angle_reach = 0.0;
  bool have_reach = false;
  for (std::size_t i = 0; i < profile.theta.size(); ++i)
    if (profile.valid[i] && profile.theta[i] > lo && profile.theta[i] < hi) {
      angle_reach = have_reach ? std::max(angle_reach, profile.angle[i])
                               : profile.angle[i];
      have_reach = true;
    }
  auto angle_near = [&](double theta) {
    double best = 0.0, dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.theta.size(); ++i) {
      if (!profile.valid[i]) continue;
      const double d = std::abs(profile.theta[i] - theta);
      if (d < dist) {
        dist = d;
        best = profile.angle[i];
      }
    }
    return best;
  };

  for (double eps : eps_grid) {
    const GridSelection sel =
        select_minimum(field, wu, orbit, profile, eps, lo, hi, cfg);
    if (!sel.boundary && have_reach &&
        angle_reach - angle_near(sel.theta_min) < kPi)
      throw std::runtime_error(
          "om_jump_scan: grid ends less than a half-wind beyond the "
          "minimizer; extend the profile tail toward theta1");
    JumpPoint pt;
    pt.eps = eps;
    pt.theta_min = sel.theta_min;
    pt.total = sel.total;
    pt.boundary = sel.boundary;
    pt.local_minima = sel.local_minima;
    scan.points.push_back(std::move(pt));
  }
  for (std::size_t i = 0; i + 1 < scan.points.size(); ++i)
    if (std::abs(scan.points[i + 1].theta_min - scan.points[i].theta_min) >
        jump_tol)
      scan.jumps.push_back(i);
  return scan;
}

double PhaseCalibration::apply(double theta) const {
  double t = (reflect ? -theta : theta) + offset;
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

PhaseCalibration calibrate_phase(double raw1, double raw2, double ref1,
                                 double ref2, double tol) {
  for (const bool reflect : {false, true}) {
    PhaseCalibration cal;
    cal.reflect = reflect;
    cal.offset = ref1 - (reflect ? -raw1 : raw1);
    if (std::abs(wrap_pi(cal.apply(raw2) - ref2)) <= tol) return cal;
  }
  throw std::runtime_error(
      "calibrate_phase: banks do not match under a single offset/reflection");
}

}  // namespace mpep
