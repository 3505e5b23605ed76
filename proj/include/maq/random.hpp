#pragma once

#include <random>

#include "maq/ma_linear.hpp"
#include "maq/quaternion.hpp"

namespace maq {

using Rng = std::mt19937_64;

inline Quat random_quaternion(Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return Quat(n(rng), n(rng), n(rng), n(rng));
}

inline Quat random_unit_quaternion(Rng& rng) {
  Quat q = random_quaternion(rng);
  while (q.norm() < 1e-6) q = random_quaternion(rng);
  return q.normalized();
}

inline Quat random_unit_imaginary(Rng& rng) {
  Quat q = random_quaternion(rng);
  q.a = 0;
  while (q.norm() < 1e-6) {
    q = random_quaternion(rng);
    q.a = 0;
  }
  return q.normalized();
}

inline Mat2 random_mat2(Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Mat2 A;
  A << n(rng), n(rng), n(rng), n(rng);
  return A;
}

// Symmetric with det = 1, eigenvalues in [lo, hi]; definite (sign = +-1).
inline Mat2 random_sym_det1(Rng& rng, int sign = +1, double lo = 0.25,
                            double hi = 4.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> ang(0.0, 3.14159265358979323846);
  const double l1 = u(rng);
  const double th = ang(rng);
  Mat2 R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Mat2 D = Mat2::Zero();
  D(0, 0) = sign * l1;
  D(1, 1) = sign / l1;
  return R * D * R.transpose();
}

inline Eigen::MatrixXd random_special_orthogonal(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  if (Q.determinant() < 0) Q.col(0) = -Q.col(0);
  return Q;
}

inline Vec4 random_vec4(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec4(n(rng), n(rng), n(rng), n(rng));
}

inline Plane4 random_plane(Rng& rng) {
  while (true) {
    const Vec4 u = random_vec4(rng);
    const Vec4 v = random_vec4(rng);
    if (u.norm() < 1e-3 || v.norm() < 1e-3) continue;
    const Vec4 w = v - u.dot(v) / u.squaredNorm() * u;
    if (w.norm() < 1e-3) continue;
    return Plane4::from_span(u, v);
  }
}

// Orthonormal imaginary triple (x, y, x*y) from a random rotation of (i,j,k).
inline std::array<Quat, 3> random_imaginary_triple(Rng& rng) {
  const Quat x = random_unit_imaginary(rng);
  Quat seed = random_unit_imaginary(rng);
  while (std::abs(inner(seed, x)) > 0.9) seed = random_unit_imaginary(rng);
  const Quat y0 = seed - inner(seed, x) * x;
  const Quat y = y0.normalized();
  return {x, y, x * y};
}

}  // namespace maq
