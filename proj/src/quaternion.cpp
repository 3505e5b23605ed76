#include "maq/quaternion.hpp"

namespace maq {

double volume_form(const Quat& x, const Quat& y, const Quat& z, double eps) {
  if (std::abs(x.a) > eps || std::abs(y.a) > eps || std::abs(z.a) > eps) {
    throw NonImaginaryInput();
  }
  return -(x * y * z).a;
}

Quat apply(const Mat4& M, const Quat& q) {
  return Quat::from_coeffs(M * q.coeffs());
}

Mat4 left_mult_matrix(const Quat& x) {
  Mat4 M;
  M.col(0) = (x * Quat::one()).coeffs();
  M.col(1) = (x * Quat::i()).coeffs();
  M.col(2) = (x * Quat::j()).coeffs();
  M.col(3) = (x * Quat::k()).coeffs();
  return M;
}

Mat4 right_mult_matrix(const Quat& y) {
  Mat4 M;
  M.col(0) = (Quat::one() * y).coeffs();
  M.col(1) = (Quat::i() * y).coeffs();
  M.col(2) = (Quat::j() * y).coeffs();
  M.col(3) = (Quat::k() * y).coeffs();
  return M;
}

Mat4 spin_action(const Quat& x, const Quat& y) {
  if (!x.is_unit(tol::kTight * 10) || !y.is_unit(tol::kTight * 10)) {
    throw NonUnitInput();
  }
  return left_mult_matrix(x) * right_mult_matrix(y.conj());
}

Mat4 left_complex_structure(const Quat& x) {
  if (!x.is_unit() || !x.is_imaginary()) {
    throw NonUnitInput("left_complex_structure needs a unit imaginary quaternion");
  }
  return left_mult_matrix(x);
}

namespace {

// Rotation matrix on the imaginary subspace -> unit quaternion, largest-trace
// branch (Shepperd). R acts on coefficients (b, c, d).
Quat quat_from_rotation(const Mat3& R) {
  const double tr = R.trace();
  double a, b, c, d;
  if (tr > 0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    a = 0.25 * s;
    b = (R(2, 1) - R(1, 2)) / s;
    c = (R(0, 2) - R(2, 0)) / s;
    d = (R(1, 0) - R(0, 1)) / s;
  } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
    const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    a = (R(2, 1) - R(1, 2)) / s;
    b = 0.25 * s;
    c = (R(0, 1) + R(1, 0)) / s;
    d = (R(0, 2) + R(2, 0)) / s;
  } else if (R(1, 1) >= R(2, 2)) {
    const double s = std::sqrt(1.0 - R(0, 0) + R(1, 1) - R(2, 2)) * 2.0;
    a = (R(0, 2) - R(2, 0)) / s;
    b = (R(0, 1) + R(1, 0)) / s;
    c = 0.25 * s;
    d = (R(1, 2) + R(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 - R(0, 0) - R(1, 1) + R(2, 2)) * 2.0;
    a = (R(1, 0) - R(0, 1)) / s;
    b = (R(0, 2) + R(2, 0)) / s;
    c = (R(1, 2) + R(2, 1)) / s;
    d = 0.25 * s;
  }
  return Quat(a, b, c, d).normalized();
}

// Double-cover sign fix: non-negative real part; if zero, non-negative i,
// then j, then k component.
Quat canonical_sign(const Quat& q, double eps = tol::kTight) {
  const double comps[4] = {q.a, q.b, q.c, q.d};
  for (double v : comps) {
    if (v > eps) return q;
    if (v < -eps) return -q;
  }
  return q;
}

double reconstruction_error(const Mat4& M, const Mat4& candidate) {
  return (M - candidate).cwiseAbs().maxCoeff();
}

}  // namespace

StructureClassification classify_structure(const Mat4& M) {
  const double eps = tol::kStructure;

  // Left multiplication: x = M(1).
  {
    const Quat x = apply(M, Quat::one());
    if (x.is_unit(eps) && x.is_imaginary(eps)) {
      const double res = reconstruction_error(M, left_mult_matrix(x));
      if (res <= eps) return {StructureKind::LeftComplex, x, res};
    }
  }

  // Right structure h(1, x): w -> w * conj(x), so x = conj(M(1)).
  {
    const Quat x = apply(M, Quat::one()).conj();
    if (x.is_unit(eps) && x.is_imaginary(eps)) {
      const double res = reconstruction_error(M, right_mult_matrix(x.conj()));
      if (res <= eps) return {StructureKind::RightComplex, x, res};
    }
  }

  // Inner automorphism: fixes 1, rotates the imaginary subspace.
  {
    const Quat fix = apply(M, Quat::one());
    const bool fixes_one = (fix - Quat::one()).norm() <= eps;
    const bool orthogonal =
        (M.transpose() * M - Mat4::Identity()).cwiseAbs().maxCoeff() <= eps;
    if (fixes_one && orthogonal) {
      const Mat3 R = M.block<3, 3>(1, 1);
      if (std::abs(R.determinant() - 1.0) <= 1e-8) {
        const Quat z = canonical_sign(quat_from_rotation(R));
        const double res = reconstruction_error(M, spin_action(z, z));
        if (res <= eps) return {StructureKind::Automorphism, z, res};
      }
    }
  }

  return {StructureKind::NotApplicable, Quat(), 0};
}

}  // namespace maq
