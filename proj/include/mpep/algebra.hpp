#pragma once

// Small fixed-size vector/matrix helpers used throughout the library.
// Hot loops work on std::array states; anything that needs eigenvalues or
// SVD goes through Eigen in the corresponding .cpp file.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace mpep {

template <std::size_t N>
using Vec = std::array<double, N>;

using Vec2 = Vec<2>;
using Vec4 = Vec<4>;
using Vec6 = Vec<6>;

template <std::size_t N>
inline Vec<N> operator+(const Vec<N>& a, const Vec<N>& b) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t N>
inline Vec<N> operator-(const Vec<N>& a, const Vec<N>& b) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t N>
inline Vec<N> operator*(double s, const Vec<N>& a) {
  Vec<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = s * a[i];
  return r;
}

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
inline double norm(const Vec<N>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t N>
inline double norm_inf(const Vec<N>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

template <std::size_t N>
inline bool all_finite(const Vec<N>& a) {
  for (std::size_t i = 0; i < N; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

// Row-major square matrices.
template <std::size_t N>
using Mat = std::array<double, N * N>;

using Mat2 = Mat<2>;
using Mat4 = Mat<4>;

template <std::size_t N>
inline Vec<N> matvec(const Mat<N>& m, const Vec<N>& v) {
  Vec<N> r{};
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += m[i * N + j] * v[j];
    r[i] = s;
  }
  return r;
}

template <std::size_t N>
inline Mat<N> matmul(const Mat<N>& a, const Mat<N>& b) {
  Mat<N> r{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const double aik = a[i * N + k];
      for (std::size_t j = 0; j < N; ++j) r[i * N + j] += aik * b[k * N + j];
    }
  return r;
}

template <std::size_t N>
inline Mat<N> transpose(const Mat<N>& a) {
  Mat<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r[j * N + i] = a[i * N + j];
  return r;
}

inline double det2(const Mat2& m) { return m[0] * m[3] - m[1] * m[2]; }

inline Mat2 inverse2(const Mat2& m) {
  const double d = det2(m);
  if (d == 0.0) throw std::domain_error("inverse2: singular matrix");
  return Mat2{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d};
}

inline double wrap_2pi(double a) {
  const double two_pi = 2.0 * M_PI;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

// Signed smallest difference a-b on the circle, in (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2.0 * M_PI);
  if (d <= -M_PI) d += 2.0 * M_PI;
  if (d > M_PI) d -= 2.0 * M_PI;
  return d;
}

}  // namespace mpep
