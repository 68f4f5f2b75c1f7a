#include "mpep/parameterization.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpep {

namespace {

using cd = std::complex<double>;
using Mono = PolynomialDrift::Monomial;

std::size_t tri_index(int m, int n) {
  const int d = m + n;
  return static_cast<std::size_t>(d * (d + 1) / 2 + n);
}

std::size_t tri_size(int order) {
  return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
}

// Two-variable truncated power series over C.
struct Series {
  int order;
  std::vector<cd> c;

  explicit Series(int m) : order(m), c(tri_size(m), cd(0.0)) {}

  cd& at(int m, int n) { return c[tri_index(m, n)]; }
  cd at(int m, int n) const { return c[tri_index(m, n)]; }

  void add_scaled(const Series& other, cd s) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * other.c[i];
  }
};

Series mul(const Series& a, const Series& b, int cap) {
  Series out(a.order);
  for (int da = 0; da <= cap; ++da)
    for (int na = 0; na <= da; ++na) {
      const cd av = a.at(da - na, na);
      if (av == cd(0.0)) continue;
      for (int db = 0; db + da <= cap; ++db)
        for (int nb = 0; nb <= db; ++nb) {
          const cd bv = b.at(db - nb, nb);
          if (bv == cd(0.0)) continue;
          out.at(da - na + db - nb, na + nb) += av * bv;
        }
    }
  return out;
}

// Composition of a polynomial in (x, y) with series X, Y, truncated at cap.
Series compose(const std::vector<Mono>& terms, const Series& x,
               const Series& y, int cap) {
  int max_i = 0, max_j = 0;
  for (const Mono& t : terms) {
    max_i = std::max(max_i, t.i);
    max_j = std::max(max_j, t.j);
  }
  std::vector<Series> xp, yp;
  xp.reserve(max_i + 1);
  yp.reserve(max_j + 1);
  Series one(x.order);
  one.at(0, 0) = 1.0;
  xp.push_back(one);
  yp.push_back(one);
  for (int i = 1; i <= max_i; ++i) xp.push_back(mul(xp.back(), x, cap));
  for (int j = 1; j <= max_j; ++j) yp.push_back(mul(yp.back(), y, cap));

  Series out(x.order);
  for (const Mono& t : terms)
    out.add_scaled(mul(xp[t.i], yp[t.j], cap), cd(t.c));
  return out;
}

std::vector<Mono> d_dx(const std::vector<Mono>& terms) {
  std::vector<Mono> out;
  for (const Mono& t : terms)
    if (t.i >= 1) out.push_back({t.i - 1, t.j, t.c * t.i});
  return out;
}

std::vector<Mono> d_dy(const std::vector<Mono>& terms) {
  std::vector<Mono> out;
  for (const Mono& t : terms)
    if (t.j >= 1) out.push_back({t.i, t.j - 1, t.c * t.j});
  return out;
}

struct DriftTables {
  std::vector<Mono> f, g;
};

DriftTables drift_tables(const DriftField& field) {
  if (const auto* ivdp = dynamic_cast<const IvdpDrift*>(&field)) {
    const double e = ivdp->eta();
    return DriftTables{{{0, 1, 1.0}},
                       {{1, 0, -1.0}, {0, 1, -2.0 * e}, {2, 1, 2.0 * e}}};
  }
  if (const auto* poly = dynamic_cast<const PolynomialDrift*>(&field))
    return DriftTables{poly->f_terms(), poly->g_terms()};
  throw std::invalid_argument(
      "parameterization: drift field has no exact monomial tables");
}

}  // namespace

Vec4 LocalUnstableManifold::eval(cd z1, int order_cap) const {
  const int cap = order_cap < 0 ? order : std::min(order_cap, order);
  const cd z2 = std::conj(z1);
  std::vector<cd> p1(cap + 1), p2(cap + 1);
  p1[0] = p2[0] = 1.0;
  for (int k = 1; k <= cap; ++k) {
    p1[k] = p1[k - 1] * z1;
    p2[k] = p2[k - 1] * z2;
  }
  std::array<cd, 4> acc{};
  for (int d = 1; d <= cap; ++d)
    for (int n = 0; n <= d; ++n) {
      const auto& a = alpha[index(d - n, n)];
      const cd w = p1[d - n] * p2[n];
      for (int i = 0; i < 4; ++i) acc[i] += a[i] * w;
    }
  return Vec4{acc[0].real(), acc[1].real(), acc[2].real(), acc[3].real()};
}

Vec4 LocalUnstableManifold::k_tangent(double theta) const {
  const cd z1 = std::polar(1.0, theta);
  const cd z2 = std::conj(z1);
  std::vector<cd> p1(order + 1), p2(order + 1);
  p1[0] = p2[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    p1[k] = p1[k - 1] * z1;
    p2[k] = p2[k - 1] * z2;
  }
  std::array<cd, 4> acc{};
  const cd iu(0.0, 1.0);
  for (int d = 1; d <= order; ++d)
    for (int n = 0; n <= d; ++n) {
      const auto& a = alpha[index(d - n, n)];
      const cd w = iu * static_cast<double>(d - 2 * n) * p1[d - n] * p2[n];
      for (int i = 0; i < 4; ++i) acc[i] += a[i] * w;
    }
  return Vec4{acc[0].real(), acc[1].real(), acc[2].real(), acc[3].real()};
}

Vec4 LocalUnstableManifold::flow_derivative(cd z1, int order_cap) const {
  const int cap = order_cap < 0 ? order : std::min(order_cap, order);
  const cd z2 = std::conj(z1);
  std::vector<cd> p1(cap + 1), p2(cap + 1);
  p1[0] = p2[0] = 1.0;
  for (int k = 1; k <= cap; ++k) {
    p1[k] = p1[k - 1] * z1;
    p2[k] = p2[k - 1] * z2;
  }
  std::array<cd, 4> acc{};
  for (int d = 1; d <= cap; ++d)
    for (int n = 0; n <= d; ++n) {
      const auto& a = alpha[index(d - n, n)];
      const cd w = (static_cast<double>(d - n) * mu1 +
                    static_cast<double>(n) * mu2) *
                   p1[d - n] * p2[n];
      for (int i = 0; i < 4; ++i) acc[i] += a[i] * w;
    }
  return Vec4{acc[0].real(), acc[1].real(), acc[2].real(), acc[3].real()};
}

double LocalUnstableManifold::boundary_residual(const DriftField& field,
                                                int samples,
                                                int order_cap) const {
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double th = 2.0 * M_PI * j / samples;
    const cd z1 = std::polar(1.0, th);
    const Vec4 pt = eval(z1, order_cap);
    const Vec4 fd = flow_derivative(z1, order_cap);
    const Vec4 tf = lift_rhs(field, pt);
    worst = std::max(worst, norm(tf - fd));
  }
  return worst;
}

double LocalUnstableManifold::patch_hamiltonian_sup(const DriftField& field,
                                                    int radial,
                                                    int angular) const {
  double worst = 0.0;
  for (int i = 1; i <= radial; ++i) {
    const double r = static_cast<double>(i) / radial;
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * M_PI * j / angular;
      const Vec4 pt = eval(std::polar(r, th));
      worst = std::max(worst, std::abs(hamiltonian(field, pt)));
    }
  }
  return worst;
}

Vec4 LocalUnstableManifold::inner_point(double theta, double distance,
                                        double* t_k) const {
  const double beta = mu1.imag() / mu1.real();
  auto image_norm = [&](double s) {
    return norm(eval(std::polar(s, theta + beta * std::log(s))));
  };
  double lo = 1e-9, hi = 0.5;
  if (image_norm(lo) > distance || image_norm(hi) < distance)
    throw std::invalid_argument("inner_point: distance outside [|P(1e-9)|, |P(0.5)|]");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (image_norm(mid) < distance ? lo : hi) = mid;
  }
  if (t_k) *t_k = -std::log(lo) / mu1.real();
  return eval(std::polar(lo, theta + beta * std::log(lo)));
}

LocalUnstableManifold build_unstable_manifold(
    const DriftField& field, const UnstableManifoldConfig& cfg) {
  const DriftTables tab = drift_tables(field);
  const std::vector<Mono> fx = d_dx(tab.f), fy = d_dy(tab.f);
  const std::vector<Mono> gx = d_dx(tab.g), gy = d_dy(tab.g);
  const int M = cfg.order;

  // Linearization at the origin and its unstable eigenpair.
  const LiftLinearization lin0 =
      lift_linearization(field, Vec4{0.0, 0.0, 0.0, 0.0});
  Eigen::Matrix4d a0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a0(i, j) = lin0.a[i * 4 + j];
  Eigen::EigenSolver<Eigen::Matrix4d> es(a0);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("parameterization: eigensolver failed");
  int pick = -1;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()[i].real() > 0.0 && es.eigenvalues()[i].imag() > 0.0)
      pick = i;
  if (pick < 0)
    throw std::runtime_error(
        "parameterization: no complex unstable eigenvalue pair");
  const cd mu1 = es.eigenvalues()[pick];
  const cd mu2 = std::conj(mu1);

  Eigen::Vector4cd xi = es.eigenvectors().col(pick);
  xi /= xi.norm();
  if (cfg.normalize_phase) {
    if (std::abs(xi[0]) < 1e-12)
      throw std::runtime_error(
          "parameterization: eigenvector x-component vanishes");
    xi *= std::conj(xi[0]) / std::abs(xi[0]);
  }
  xi *= cfg.eigvec_premultiplier;

  // Order-by-order solution of the homological equations at base scale.
  std::array<Series, 4> comp{Series(M), Series(M), Series(M), Series(M)};
  for (int i = 0; i < 4; ++i) {
    comp[i].at(1, 0) = xi[i];
    comp[i].at(0, 1) = std::conj(xi[i]);
  }

  Eigen::Matrix4cd a0c = a0.cast<cd>();
  for (int d = 2; d <= M; ++d) {
    // Compose the lift field with the series known through order d-1; the
    // order-d coefficients of the result are exactly the nonlinear forcing.
    const Series sf = compose(tab.f, comp[0], comp[1], d);
    const Series sg = compose(tab.g, comp[0], comp[1], d);
    const Series sfx = compose(fx, comp[0], comp[1], d);
    const Series sfy = compose(fy, comp[0], comp[1], d);
    const Series sgx = compose(gx, comp[0], comp[1], d);
    const Series sgy = compose(gy, comp[0], comp[1], d);

    Series f1 = sf, f2 = sg;
    f1.add_scaled(comp[2], 1.0);
    f2.add_scaled(comp[3], 1.0);
    Series f3 = mul(sfx, comp[2], d);
    f3.add_scaled(mul(sgx, comp[3], d), 1.0);
    Series f4 = mul(sfy, comp[2], d);
    f4.add_scaled(mul(sgy, comp[3], d), 1.0);

    for (int n = 0; n <= d; ++n) {
      const int m = d - n;
      Eigen::Vector4cd rhs;
      rhs[0] = f1.at(m, n);
      rhs[1] = f2.at(m, n);
      rhs[2] = -f3.at(m, n);
      rhs[3] = -f4.at(m, n);
      const cd lam = static_cast<double>(m) * mu1 + static_cast<double>(n) * mu2;
      Eigen::Matrix4cd sys = lam * Eigen::Matrix4cd::Identity() - a0c;
      const Eigen::Vector4cd sol = sys.partialPivLu().solve(rhs);
      for (int i = 0; i < 4; ++i) comp[i].at(m, n) = sol[i];
    }
  }

  LocalUnstableManifold wu;
  wu.order = M;
  wu.mu1 = mu1;
  wu.mu2 = mu2;
  wu.alpha.assign(tri_size(M), {});
  for (int d = 1; d <= M; ++d)
    for (int n = 0; n <= d; ++n)
      for (int i = 0; i < 4; ++i)
        wu.alpha[tri_index(d - n, n)][i] = comp[i].at(d - n, n);
  for (const auto& a : wu.alpha)
    for (int i = 0; i < 4; ++i)
      if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag()))
        throw std::runtime_error("parameterization: coefficients not finite");

  // Base-scale series evaluated at radius s equals the rescaled series on
  // the unit circle, so the scale search reuses the same coefficients. The
  // sup norms are sampled; the margin keeps denser probes under the pinned
  // tolerances.
  const double res_gate = 0.8 * cfg.residual_tol;
  const double h_gate = 0.8 * cfg.h_tol;
  auto passes = [&](double s) {
    double worst = 0.0;
    for (int j = 0; j < cfg.boundary_samples; ++j) {
      const double th = 2.0 * M_PI * j / cfg.boundary_samples;
      const cd z1 = std::polar(s, th);
      const Vec4 pt = wu.eval(z1);
      const Vec4 fd = wu.flow_derivative(z1);
      const Vec4 tf = lift_rhs(field, pt);
      worst = std::max(worst, norm(tf - fd));
      if (worst > res_gate) return false;
    }
    for (int i = 1; i <= 4; ++i)
      for (int j = 0; j < cfg.boundary_samples / 4; ++j) {
        const double th = 8.0 * M_PI * j / cfg.boundary_samples;
        const Vec4 pt = wu.eval(std::polar(s * i / 4.0, th));
        if (std::abs(hamiltonian(field, pt)) > h_gate) return false;
      }
    return true;
  };

  double lo = 1.0, hi = 2.0;
  if (passes(1.0)) {
    while (passes(hi) && hi < 1e9) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    while (!passes(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-12)
        throw std::runtime_error("parameterization: no admissible scale");
    }
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid))
      lo = mid;
    else
      hi = mid;
  }

  wu.scale = lo;
  for (int d = 1; d <= M; ++d) {
    const double sd = std::pow(lo, d);
    for (int n = 0; n <= d; ++n)
      for (int i = 0; i < 4; ++i) wu.alpha[tri_index(d - n, n)][i] *= sd;
  }
  return wu;
}

GrownTrajectory grow_from_k(const DriftField& field,
                            const LocalUnstableManifold& wu, double theta,
                            const GrowStop& stop,
                            const IntegratorConfig& integ) {
  auto rhs = [&](double, const Vec4& s, Vec4& ds) { ds = lift_rhs(field, s); };
  std::vector<EventSpec<4>> evs;
  int cross_idx = -1, guard_idx = -1;
  if (stop.orbit && stop.stop_on_crossing) {
    cross_idx = static_cast<int>(evs.size());
    const PeriodicOrbit* orb = stop.orbit;
    evs.push_back(EventSpec<4>{
        [orb](double, const Vec4& y) { return orb->radial_gap(y[0], y[1]); },
        EventDirection::rising, true});
  }
  guard_idx = static_cast<int>(evs.size());
  const double rmax = stop.max_radius;
  evs.push_back(EventSpec<4>{
      [rmax](double, const Vec4& y) { return norm_inf(y) - rmax; },
      EventDirection::rising, true});

  GrownTrajectory out;
  out.traj = integrate<4>(rhs, wu.k_point(theta), 0.0, stop.max_time, integ,
                          evs);
  for (const auto& hit : out.traj.hits) {
    if (cross_idx >= 0 && hit.event == static_cast<std::size_t>(cross_idx)) {
      out.crossed = true;
      out.cross_time = hit.t;
      out.cross_state = hit.y;
    }
    if (hit.event == static_cast<std::size_t>(guard_idx)) out.blew_up = true;
  }
  return out;
}

}  // namespace mpep
