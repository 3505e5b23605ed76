#pragma once

#include <cmath>

#include "maq/common.hpp"

namespace maq {

// Quaternion with storage order (a, b, c, d) = coefficients of (1, i, j, k).
template <typename Scalar = double>
struct Quaternion {
  Scalar a{0}, b{0}, c{0}, d{0};

  constexpr Quaternion() = default;
  constexpr Quaternion(Scalar a_, Scalar b_, Scalar c_, Scalar d_)
      : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr Quaternion one() { return {1, 0, 0, 0}; }
  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  static Quaternion from_coeffs(const Eigen::Matrix<Scalar, 4, 1>& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  Eigen::Matrix<Scalar, 4, 1> coeffs() const {
    return Eigen::Matrix<Scalar, 4, 1>(a, b, c, d);
  }

  constexpr Quaternion operator+(const Quaternion& o) const {
    return {a + o.a, b + o.b, c + o.c, d + o.d};
  }
  constexpr Quaternion operator-(const Quaternion& o) const {
    return {a - o.a, b - o.b, c - o.c, d - o.d};
  }
  constexpr Quaternion operator-() const { return {-a, -b, -c, -d}; }
  constexpr Quaternion operator*(Scalar s) const {
    return {a * s, b * s, c * s, d * s};
  }

  // Hamilton product from i^2 = j^2 = k^2 = ijk = -1.
  constexpr Quaternion operator*(const Quaternion& o) const {
    return {a * o.a - b * o.b - c * o.c - d * o.d,
            a * o.b + b * o.a + c * o.d - d * o.c,
            a * o.c - b * o.d + c * o.a + d * o.b,
            a * o.d + b * o.c - c * o.b + d * o.a};
  }

  constexpr Quaternion conj() const { return {a, -b, -c, -d}; }
  constexpr Scalar real_part() const { return a; }
  constexpr Quaternion imag_part() const { return {0, b, c, d}; }

  constexpr Scalar norm2() const { return a * a + b * b + c * c + d * d; }
  Scalar norm() const { return std::sqrt(norm2()); }
  Quaternion normalized() const {
    const Scalar n = norm();
    return {a / n, b / n, c / n, d / n};
  }
  Quaternion inverse() const {
    const Scalar n2 = norm2();
    return {a / n2, -b / n2, -c / n2, -d / n2};
  }

  bool is_unit(Scalar eps = tol::kStructure) const {
    return std::abs(norm() - Scalar(1)) <= eps;
  }
  bool is_imaginary(Scalar eps = tol::kStructure) const {
    return std::abs(a) <= eps;
  }
};

using Quat = Quaternion<double>;

template <typename Scalar>
constexpr Quaternion<Scalar> operator*(Scalar s, const Quaternion<Scalar>& q) {
  return q * s;
}

// <x,y> = R(x * conj(y)); coincides with the euclidean dot product of
// coefficient vectors.
template <typename Scalar>
constexpr Scalar inner(const Quaternion<Scalar>& x, const Quaternion<Scalar>& y) {
  return (x * y.conj()).a;
}

// Volume form over the imaginary subspace, oriented so (i, j, k) is positive.
// Throws NonImaginaryInput when an argument has a real part.
double volume_form(const Quat& x, const Quat& y, const Quat& z,
                   double eps = tol::kTight);

// Matrix of z -> x * z on coefficients (a, b, c, d).
Mat4 left_mult_matrix(const Quat& x);
// Matrix of z -> z * y.
Mat4 right_mult_matrix(const Quat& y);

// Matrix of the double cover h(x, y): z -> x * z * conj(y). Requires unit
// arguments; the result is special orthogonal with kernel {+-(1,1)}.
Mat4 spin_action(const Quat& x, const Quat& y);

// J_x = h(x, 1), the left complex structure of a unit imaginary quaternion.
Mat4 left_complex_structure(const Quat& x);

enum class StructureKind { LeftComplex, RightComplex, Automorphism, NotApplicable };

struct StructureClassification {
  StructureKind kind = StructureKind::NotApplicable;
  Quat generator;    // x with M = h(x,1) / h(1,x), or the conjugator z
  double residual = 0;  // entrywise reconstruction error
};

// Recognizes left/right multiplication structures and inner automorphisms
// w -> z * w * conj(z). The conjugator sign is canonical: non-negative real
// part, ties broken on the i, then j, then k component.
StructureClassification classify_structure(const Mat4& M);

Quat apply(const Mat4& M, const Quat& q);

}  // namespace maq
