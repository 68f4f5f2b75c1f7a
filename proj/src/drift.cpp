#include "mpep/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace mpep {

namespace {

void check_input(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::domain_error("drift field evaluated at non-finite point");
}

double ipow(double v, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= v;
  return r;
}

}  // namespace

DriftDerivs IvdpDrift::derivs(double x, double y) const {
  check_input(x, y);
  const double e = eta_;
  DriftDerivs d;
  d.f = y;
  d.fx = 0.0;
  d.fy = 1.0;
  d.g = -x + 2.0 * e * y * (x * x - 1.0);
  d.gx = -1.0 + 4.0 * e * x * y;
  d.gy = 2.0 * e * (x * x - 1.0);
  d.gxx = 4.0 * e * y;
  d.gxy = 4.0 * e * x;
  d.gyy = 0.0;
  return d;
}

DriftDerivs PolynomialDrift::derivs(double x, double y) const {
  check_input(x, y);
  DriftDerivs d;
  auto accumulate = [&](const std::vector<Monomial>& terms, double& v,
                        double& vx, double& vy, double& vxx, double& vxy,
                        double& vyy) {
    for (const Monomial& m : terms) {
      const double xi = ipow(x, m.i);
      const double yj = ipow(y, m.j);
      v += m.c * xi * yj;
      if (m.i >= 1) vx += m.c * m.i * ipow(x, m.i - 1) * yj;
      if (m.j >= 1) vy += m.c * m.j * xi * ipow(y, m.j - 1);
      if (m.i >= 2) vxx += m.c * m.i * (m.i - 1) * ipow(x, m.i - 2) * yj;
      if (m.i >= 1 && m.j >= 1)
        vxy += m.c * m.i * m.j * ipow(x, m.i - 1) * ipow(y, m.j - 1);
      if (m.j >= 2) vyy += m.c * m.j * (m.j - 1) * xi * ipow(y, m.j - 2);
    }
  };
  accumulate(f_, d.f, d.fx, d.fy, d.fxx, d.fxy, d.fyy);
  accumulate(g_, d.g, d.gx, d.gy, d.gxx, d.gxy, d.gyy);
  return d;
}

DriftDerivs NumericalDrift::derivs(double x, double y) const {
  check_input(x, y);
  const double h = h_;
  auto d1 = [&](const Scalar2& fn, double cx, double cy, bool wrt_x) {
    const double dx = wrt_x ? h : 0.0, dy = wrt_x ? 0.0 : h;
    return (fn(cx + dx, cy + dy) - fn(cx - dx, cy - dy)) / (2.0 * h);
  };
  auto d2 = [&](const Scalar2& fn, bool xx) {
    const double dx = xx ? h : 0.0, dy = xx ? 0.0 : h;
    return (fn(x + dx, y + dy) - 2.0 * fn(x, y) + fn(x - dx, y - dy)) /
           (h * h);
  };
  auto dxy = [&](const Scalar2& fn) {
    return (fn(x + h, y + h) - fn(x + h, y - h) - fn(x - h, y + h) +
            fn(x - h, y - h)) /
           (4.0 * h * h);
  };
  DriftDerivs d;
  d.f = f_(x, y);
  d.g = g_(x, y);
  d.fx = d1(f_, x, y, true);
  d.fy = d1(f_, x, y, false);
  d.gx = d1(g_, x, y, true);
  d.gy = d1(g_, x, y, false);
  d.fxx = d2(f_, true);
  d.fyy = d2(f_, false);
  d.fxy = dxy(f_);
  d.gxx = d2(g_, true);
  d.gyy = d2(g_, false);
  d.gxy = dxy(g_);
  return d;
}

std::unique_ptr<DriftField> make_ivdp(double eta) {
  return std::make_unique<IvdpDrift>(eta);
}

}  // namespace mpep
