#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace reloop {

/// Dense 2x2 matrix of doubles. Row-major entries m[row][col].
struct Matrix2 {
  double m11 = 0.0, m12 = 0.0;
  double m21 = 0.0, m22 = 0.0;

  static constexpr Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr double trace() const { return m11 + m22; }
  constexpr double det() const { return m11 * m22 - m12 * m21; }

  bool finite() const {
    return std::isfinite(m11) && std::isfinite(m12) && std::isfinite(m21) &&
           std::isfinite(m22);
  }

  friend constexpr Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }

  friend constexpr Matrix2 operator*(double s, const Matrix2& a) {
    return {s * a.m11, s * a.m12, s * a.m21, s * a.m22};
  }

  friend constexpr Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
    return {a.m11 + b.m11, a.m12 + b.m12, a.m21 + b.m21, a.m22 + b.m22};
  }
};

using EigenPair = std::array<std::complex<double>, 2>;

/// Eigenvalues of a real 2x2 matrix, ordered by descending modulus;
/// ties broken by descending real part, then descending imaginary part.
///
/// Uses the numerically stable form of the quadratic: the discriminant is
/// computed as ((m11 - m22)/2)^2 + m12*m21, which avoids the cancellation
/// in trace^2/4 - det, and the smaller real root is recovered as det / r1.
inline EigenPair eigenvalues_2x2(const Matrix2& a) {
  const double mean = 0.5 * (a.m11 + a.m22);
  const double half_diff = 0.5 * (a.m11 - a.m22);
  const double disc = half_diff * half_diff + a.m12 * a.m21;

  std::complex<double> l1, l2;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Root of larger magnitude first; the other via the product of roots.
    const double q = mean >= 0.0 ? mean + s : mean - s;
    if (q == 0.0) {
      l1 = l2 = 0.0;
    } else {
      l1 = q;
      l2 = a.det() / q;
    }
  } else {
    const double s = std::sqrt(-disc);
    l1 = {mean, s};
    l2 = {mean, -s};
  }

  const auto before = [](const std::complex<double>& x,
                         const std::complex<double>& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  };
  if (!before(l1, l2) && before(l2, l1)) std::swap(l1, l2);
  return {l1, l2};
}

} // namespace reloop
