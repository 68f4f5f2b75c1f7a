#pragma once

// Hamiltonian lift of a planar drift field. States are (x, y, p, q) with
//   H(x, y, p, q) = f*p + g*q + (p^2 + q^2)/2,
// so H = 0 trajectories with (p, q) != 0 are the large-deviation escape
// characteristics of dX = F(X) dt + sqrt(eps) dW.

#include "mpep/algebra.hpp"
#include "mpep/drift.hpp"

namespace mpep {

inline Vec4 lift_rhs(const DriftDerivs& d, const Vec4& s) {
  const double p = s[2], q = s[3];
  return Vec4{d.f + p, d.g + q, -d.fx * p - d.gx * q, -d.fy * p - d.gy * q};
}

inline Vec4 lift_rhs(const DriftField& field, const Vec4& s) {
  return lift_rhs(field.derivs(s[0], s[1]), s);
}

inline double hamiltonian(const DriftDerivs& d, const Vec4& s) {
  const double p = s[2], q = s[3];
  return d.f * p + d.g * q + 0.5 * (p * p + q * q);
}

inline double hamiltonian(const DriftField& field, const Vec4& s) {
  return hamiltonian(field.derivs(s[0], s[1]), s);
}

struct LiftLinearization {
  Mat4 a;      // Jacobian of the lift field, A = J * b_sym
  Mat4 b_sym;  // Hessian of H, symmetric
};

// Linearization of the lift field at a 4D state. The (p, q)-dependent block
//   [fxx*p + gxx*q, fxy*p + gxy*q; fxy*p + gxy*q, fyy*p + gyy*q]
// enters the Hessian's top-left corner.
inline LiftLinearization lift_linearization(const DriftDerivs& d,
                                            const Vec4& s) {
  const double p = s[2], q = s[3];
  const double hxx = d.fxx * p + d.gxx * q;
  const double hxy = d.fxy * p + d.gxy * q;
  const double hyy = d.fyy * p + d.gyy * q;
  LiftLinearization lin;
  lin.b_sym = Mat4{hxx,  hxy,  d.fx, d.gx,   //
                   hxy,  hyy,  d.fy, d.gy,   //
                   d.fx, d.fy, 1.0,  0.0,    //
                   d.gx, d.gy, 0.0,  1.0};
  lin.a = Mat4{d.fx, d.fy, 1.0,   0.0,    //
               d.gx, d.gy, 0.0,   1.0,    //
               -hxx, -hxy, -d.fx, -d.gx,  //
               -hxy, -hyy, -d.fy, -d.gy};
  return lin;
}

inline LiftLinearization lift_linearization(const DriftField& field,
                                            const Vec4& s) {
  return lift_linearization(field.derivs(s[0], s[1]), s);
}

// Project (p, q) radially (within the fiber over (x, y)) onto the H = 0
// circle centered at (-f, -g) with radius |F|. Used to re-seed states whose
// Hamiltonian drifted.
inline Vec4 project_to_zero_energy(const DriftDerivs& d, const Vec4& s) {
  const double cx = -d.f, cy = -d.g;
  const double r = std::hypot(d.f, d.g);
  const double ux = s[2] - cx, uy = s[3] - cy;
  const double n = std::hypot(ux, uy);
  if (n == 0.0) return Vec4{s[0], s[1], cx + r, cy};
  return Vec4{s[0], s[1], cx + r * ux / n, cy + r * uy / n};
}

}  // namespace mpep
