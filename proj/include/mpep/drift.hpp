#pragma once

// Planar drift fields F = (f, g) with first and second partial derivatives.
// Everything downstream (Hamiltonian lift, variational flows, action
// integrands) consumes the DriftDerivs bundle.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mpep/algebra.hpp"

namespace mpep {

struct DriftDerivs {
  double f = 0.0, g = 0.0;
  double fx = 0.0, fy = 0.0, gx = 0.0, gy = 0.0;
  double fxx = 0.0, fxy = 0.0, fyy = 0.0;
  double gxx = 0.0, gxy = 0.0, gyy = 0.0;
};

class DriftField {
 public:
  virtual ~DriftField() = default;

  // Value plus first/second partials at (x, y). Throws std::domain_error on
  // non-finite input.
  virtual DriftDerivs derivs(double x, double y) const = 0;

  virtual std::string name() const = 0;

  Vec2 value(double x, double y) const {
    const DriftDerivs d = derivs(x, y);
    return Vec2{d.f, d.g};
  }

  double divergence(double x, double y) const {
    const DriftDerivs d = derivs(x, y);
    return d.fx + d.gy;
  }

  Mat2 jacobian(double x, double y) const {
    const DriftDerivs d = derivs(x, y);
    return Mat2{d.fx, d.fy, d.gx, d.gy};
  }
};

// Inverted van der Pol oscillator: f = y, g = -x + 2*eta*y*(x^2 - 1).
// The origin is a stable focus and the (repelling) limit cycle bounds its
// basin of attraction.
class IvdpDrift final : public DriftField {
 public:
  explicit IvdpDrift(double eta = 0.5) : eta_(eta) {}

  DriftDerivs derivs(double x, double y) const override;
  std::string name() const override { return "ivdp"; }
  double eta() const { return eta_; }

 private:
  double eta_;
};

// Polynomial drift given by monomial tables {(i, j, c)} meaning c * x^i * y^j.
// Partial derivatives are exact (exponent manipulation).
class PolynomialDrift final : public DriftField {
 public:
  struct Monomial {
    int i = 0;
    int j = 0;
    double c = 0.0;
  };

  PolynomialDrift(std::vector<Monomial> f_terms, std::vector<Monomial> g_terms)
      : f_(std::move(f_terms)), g_(std::move(g_terms)) {}

  DriftDerivs derivs(double x, double y) const override;
  std::string name() const override { return "polynomial"; }

  const std::vector<Monomial>& f_terms() const { return f_; }
  const std::vector<Monomial>& g_terms() const { return g_; }

 private:
  std::vector<Monomial> f_, g_;
};

// Central-difference fallback for fields supplied only as callables.
class NumericalDrift final : public DriftField {
 public:
  using Scalar2 = std::function<double(double, double)>;

  NumericalDrift(Scalar2 f, Scalar2 g, double h = 1e-5)
      : f_(std::move(f)), g_(std::move(g)), h_(h) {}

  DriftDerivs derivs(double x, double y) const override;
  std::string name() const override { return "numerical"; }

 private:
  Scalar2 f_, g_;
  double h_;
};

std::unique_ptr<DriftField> make_ivdp(double eta = 0.5);

}  // namespace mpep
