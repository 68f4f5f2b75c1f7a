#include "mpep/orbit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "mpep/lift.hpp"

namespace mpep {

namespace {

double cross2(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

// Falling crossing of {y = 0} with x > 0 (the orbit runs clockwise).
std::vector<EventSpec<2>> section_events() {
  std::vector<EventSpec<2>> evs(1);
  evs[0].value = [](double, const Vec2& y) { return y[1]; };
  evs[0].direction = EventDirection::falling;
  evs[0].terminal = false;
  return evs;
}

struct SectionReturn {
  double x = 0.0;
  double t = 0.0;
};

SectionReturn first_return(const DriftField& field, const Vec2& start,
                           const IntegratorConfig& integ, double t_max) {
  auto rhs = [&](double, const Vec2& y, Vec2& dy) {
    const Vec2 v = field.value(y[0], y[1]);
    dy = v;
  };
  IntegratorConfig cfg = integ;
  cfg.store_dense = false;
  auto traj = integrate<2>(rhs, start, 0.0, t_max, cfg, section_events());
  for (const auto& hit : traj.hits) {
    if (hit.y[0] > 0.0 && hit.t > 1e-6)
      return SectionReturn{hit.y[0], hit.t};
  }
  throw std::runtime_error("periodic orbit: no section return found");
}

}  // namespace

double PeriodicOrbit::boundary_radius(double phi) const {
  const double ph = wrap_2pi(phi);
  const std::size_t n = sorted_phi_.size();
  // First sorted angle strictly greater than ph; the bracketing interval
  // [j, j+1) wraps around at the ends.
  const auto it = std::upper_bound(sorted_phi_.begin(), sorted_phi_.end(), ph);
  const std::size_t j =
      (it == sorted_phi_.begin() || it == sorted_phi_.end())
          ? n - 1
          : static_cast<std::size_t>(it - sorted_phi_.begin()) - 1;
  const std::size_t ia = sorted_idx_[j];
  const std::size_t ib = sorted_idx_[(j + 1) % n];
  const Vec2& a = points[ia];
  const Vec2& b = points[ib];
  const double dx = std::cos(ph), dy = std::sin(ph);
  const double denom = cross2(b[0] - a[0], b[1] - a[1], dx, dy);
  if (denom == 0.0) return std::hypot(a[0], a[1]);
  double u = cross2(dx, dy, a[0], a[1]) / denom;
  u = std::clamp(u, 0.0, 1.0);
  const double px = a[0] + u * (b[0] - a[0]);
  const double py = a[1] + u * (b[1] - a[1]);
  return px * dx + py * dy;
}

PeriodicOrbit::Projection PeriodicOrbit::project(double x, double y) const {
  const std::size_t n = points.size();
  Projection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = points[k];
    const Vec2& b = points[(k + 1) % n];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double ee = ex * ex + ey * ey;
    double u = ee > 0.0 ? ((x - a[0]) * ex + (y - a[1]) * ey) / ee : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const double px = a[0] + u * ex, py = a[1] + u * ey;
    const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
    if (d2 < best_d2) {
      best_d2 = d2;
      best.edge = k;
      best.point = Vec2{px, py};
      best.s = arc_[k] + u * std::sqrt(ee);
    }
  }
  best.dist = std::sqrt(best_d2);
  return best;
}

Vec2 PeriodicOrbit::point_at_arc(double s) const {
  const double total = arc_.back();
  double sw = std::fmod(s, total);
  if (sw < 0.0) sw += total;
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), sw);
  const std::size_t k =
      std::min<std::size_t>(points.size() - 1,
                            static_cast<std::size_t>(it - arc_.begin()) - 1);
  const Vec2& a = points[k];
  const Vec2& b = points[(k + 1) % points.size()];
  const double len = arc_[k + 1] - arc_[k];
  const double u = len > 0.0 ? (sw - arc_[k]) / len : 0.0;
  return Vec2{a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])};
}

void PeriodicOrbit::build_geometry() {
  const std::size_t n = points.size();
  if (n < 8) throw std::invalid_argument("orbit: too few samples");

  arc_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = points[k];
    const Vec2& b = points[(k + 1) % n];
    arc_[k + 1] = arc_[k] + std::hypot(b[0] - a[0], b[1] - a[1]);
  }

  // Star-shapedness: vertex angles must advance monotonically around the
  // origin with total winding +-2 pi.
  std::vector<double> phi(n);
  for (std::size_t k = 0; k < n; ++k)
    phi[k] = std::atan2(points[k][1], points[k][0]);
  double total = 0.0;
  double sign = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = angle_diff(phi[(k + 1) % n], phi[k]);
    if (sign == 0.0) sign = d > 0.0 ? 1.0 : -1.0;
    if (d * sign <= 0.0)
      throw std::runtime_error("orbit polygon is not star-shaped");
    total += d;
  }
  if (std::abs(std::abs(total) - 2.0 * M_PI) > 1e-9)
    throw std::runtime_error("orbit polygon winding != 1");

  sorted_idx_.resize(n);
  for (std::size_t k = 0; k < n; ++k) sorted_idx_[k] = k;
  if (sign < 0.0) std::reverse(sorted_idx_.begin(), sorted_idx_.end());
  std::rotate(sorted_idx_.begin(),
              std::min_element(sorted_idx_.begin(), sorted_idx_.end(),
                               [&](std::size_t a, std::size_t b) {
                                 return wrap_2pi(phi[a]) < wrap_2pi(phi[b]);
                               }),
              sorted_idx_.end());
  sorted_phi_.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    sorted_phi_[k] = wrap_2pi(phi[sorted_idx_[k]]);
  for (std::size_t k = 1; k < n; ++k)
    if (sorted_phi_[k] <= sorted_phi_[k - 1])
      throw std::runtime_error("orbit polygon angles not sortable");

  r_outside_ = 0.0;
  r_inside_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    r_outside_ = std::max(r_outside_, std::hypot(points[k][0], points[k][1]));
    const Vec2& a = points[k];
    const Vec2& b = points[(k + 1) % n];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double ee = ex * ex + ey * ey;
    double u = ee > 0.0 ? -(a[0] * ex + a[1] * ey) / ee : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    r_inside_ = std::min(r_inside_, std::hypot(a[0] + u * ex, a[1] + u * ey));
  }
}

PeriodicOrbit find_periodic_orbit(const DriftField& field,
                                  const OrbitConfig& cfg) {
  auto rhs2 = [&](double, const Vec2& y, Vec2& dy) {
    dy = field.value(y[0], y[1]);
  };

  // Backward relaxation: the orbit attracts in reverse time inside the basin.
  IntegratorConfig relax_cfg = cfg.integ;
  relax_cfg.store_dense = false;
  auto relax = integrate<2>(rhs2, cfg.relax_start, 0.0, -cfg.relax_time,
                            relax_cfg);
  if (relax.status != IntegrationStatus::ok)
    throw std::runtime_error("periodic orbit: relaxation failed");

  // Land on the section {y = 0, x > 0}.
  const SectionReturn s0 =
      first_return(field, relax.final_state(), cfg.integ, 40.0);

  // Secant refinement of x -> P(x) - x on the section.
  double a0 = s0.x;
  SectionReturn r0 = first_return(field, Vec2{a0, 0.0}, cfg.integ, 40.0);
  double h0 = r0.x - a0;
  double a1 = a0 + (std::abs(h0) > 1e-13 ? h0 : 1e-9);
  SectionReturn r1 = first_return(field, Vec2{a1, 0.0}, cfg.integ, 40.0);
  double h1 = r1.x - a1;
  for (int it = 0; it < 12 && std::abs(h1) > cfg.section_residual; ++it) {
    const double denom = h1 - h0;
    if (denom == 0.0) break;
    const double a2 = a1 - h1 * (a1 - a0) / denom;
    a0 = a1;
    h0 = h1;
    a1 = a2;
    r1 = first_return(field, Vec2{a1, 0.0}, cfg.integ, 40.0);
    h1 = r1.x - a1;
  }
  if (std::abs(h1) > 100.0 * cfg.section_residual)
    throw std::runtime_error("periodic orbit: section residual not met");

  PeriodicOrbit orbit;
  orbit.period = r1.t;

  // Dense orbit over one period plus the divergence loop integral.
  auto rhs3 = [&](double, const Vec<3>& y, Vec<3>& dy) {
    const DriftDerivs d = field.derivs(y[0], y[1]);
    dy[0] = d.f;
    dy[1] = d.g;
    dy[2] = d.fx + d.gy;
  };
  auto closed =
      integrate<3>(rhs3, Vec<3>{a1, 0.0, 0.0}, 0.0, orbit.period, cfg.integ);
  if (closed.status != IntegrationStatus::ok)
    throw std::runtime_error("periodic orbit: closing integration failed");
  orbit.log_multiplier = closed.final_state()[2];

  const std::size_t n = cfg.n_samples;
  orbit.tau.resize(n);
  orbit.points.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    orbit.tau[k] = orbit.period * static_cast<double>(k) /
                   static_cast<double>(n);
    const Vec<3> y = closed.state_at(orbit.tau[k]);
    orbit.points[k] = Vec2{y[0], y[1]};
  }

  {
    const Vec<3>& yT = closed.final_state();
    const double gap = std::hypot(yT[0] - a1, yT[1]);
    if (gap > 1e-8)
      throw std::runtime_error("periodic orbit: closure gap too large");
  }

  // Keep a plain 2D dense path for resampling.
  auto path = integrate<2>(rhs2, Vec2{a1, 0.0}, 0.0, orbit.period, cfg.integ);
  orbit.path = std::move(path);

  // Lift variational flow along the orbit: state (x, y, Phi[16]) with
  // dPhi = A(x, y, 0, 0) Phi.
  using V18 = Vec<18>;
  auto rhs18 = [&](double, const V18& y, V18& dy) {
    const DriftDerivs d = field.derivs(y[0], y[1]);
    dy[0] = d.f;
    dy[1] = d.g;
    const LiftLinearization lin =
        lift_linearization(d, Vec4{y[0], y[1], 0.0, 0.0});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
          s += lin.a[i * 4 + k] * y[2 + k * 4 + j];
        dy[2 + i * 4 + j] = s;
      }
  };
  V18 y18{};
  y18[0] = a1;
  y18[1] = 0.0;
  for (int i = 0; i < 4; ++i) y18[2 + i * 4 + i] = 1.0;
  auto var = integrate<18>(rhs18, y18, 0.0, orbit.period, cfg.integ);
  if (var.status != IntegrationStatus::ok)
    throw std::runtime_error("periodic orbit: variational flow failed");

  Eigen::Matrix4d M;
  {
    const V18& yT = var.final_state();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        orbit.monodromy[i * 4 + j] = yT[2 + i * 4 + j];
        M(i, j) = yT[2 + i * 4 + j];
      }
  }

  Eigen::EigenSolver<Eigen::Matrix4d> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("periodic orbit: eigensolver failed");
  std::array<int, 4> order{0, 1, 2, 3};
  const auto& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
  for (int i = 0; i < 4; ++i)
    orbit.lift_multipliers[i] = std::abs(ev[order[i]]);
  orbit.multiplier = orbit.lift_multipliers[3];

  // Stable direction: eigenvector of the smallest multiplier, made real.
  Eigen::Vector4cd vs = es.eigenvectors().col(order[0]);
  int imax = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(vs[i]) > std::abs(vs[imax])) imax = i;
  vs *= std::conj(vs[imax]) / std::abs(vs[imax]);
  Vec4 xs;
  double im_res = 0.0;
  for (int i = 0; i < 4; ++i) {
    xs[i] = vs[i].real();
    im_res = std::max(im_res, std::abs(vs[i].imag()));
  }
  if (im_res > 1e-8)
    throw std::runtime_error("periodic orbit: stable direction not real");
  const double nrm = norm(xs);
  for (int i = 0; i < 4; ++i) xs[i] /= nrm;
  if (std::hypot(xs[2], xs[3]) < 1e-6)
    throw std::runtime_error(
        "periodic orbit: stable direction lies in the base plane");

  // Transport along the orbit and normalize samplewise.
  orbit.stable_dirs.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const V18 yk = var.state_at(orbit.tau[k]);
    Mat4 phi;
    for (int i = 0; i < 16; ++i) phi[i] = yk[2 + i];
    Vec4 v = matvec(phi, xs);
    const double vn = norm(v);
    for (int i = 0; i < 4; ++i) v[i] /= vn;
    orbit.stable_dirs[k] = v;
  }

  orbit.build_geometry();
  return orbit;
}

}  // namespace mpep
