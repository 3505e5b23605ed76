#include "maq/ma_linear.hpp"

#include <Eigen/Eigenvalues>

namespace maq {

namespace {

StructurePack build() {
  StructurePack s;
  s.J0 << 0, -1, 1, 0;
  const Mat2 id2 = Mat2::Identity();
  const Mat2 z2 = Mat2::Zero();

  s.I << s.J0, z2, z2, -s.J0;
  s.J << z2, s.J0, s.J0, z2;
  s.K << z2, -id2, id2, z2;
  s.J0hat << s.J0, z2, z2, s.J0;
  s.g = Mat4::Identity();

  // omega_x(u, v) = g(u, X v) = u^T X v.
  s.omega_i = s.I;
  s.omega_j = s.J;
  s.omega_k = s.K;

  // m((z1,w1),(z2,w2)) = <z1,w2> + <z2,w1>.
  s.m << z2, id2, id2, z2;

  s.V = Mat42::Zero();
  s.V(2, 0) = 1;
  s.V(3, 1) = 1;
  return s;
}

Mat42 orthonormalize_pivoted(const Vec4& u, const Vec4& v, int* swapped) {
  const bool swap = v.cwiseAbs().maxCoeff() > u.cwiseAbs().maxCoeff();
  const Vec4 first = swap ? v : u;
  const Vec4 second = swap ? u : v;
  if (swapped) *swapped = swap ? -1 : +1;

  const double n1 = first.norm();
  if (n1 <= tol::kTight) throw Error("degenerate span: zero vector");
  const Vec4 b1 = first / n1;
  Vec4 rem = second - b1.dot(second) * b1;
  const double n2 = rem.norm();
  if (n2 <= tol::kTight * std::max(1.0, second.norm())) {
    throw Error("degenerate span: parallel vectors");
  }
  Mat42 B;
  B.col(0) = b1;
  B.col(1) = rem / n2;
  return B;
}

}  // namespace

const StructurePack& model() {
  static const StructurePack pack = build();
  return pack;
}

Plane4 Plane4::graph_of(const Mat2& A) {
  Vec4 u, v;
  u << 1, 0, A(0, 0), A(1, 0);
  v << 0, 1, A(0, 1), A(1, 1);
  Plane4 p;
  p.basis_ = orthonormalize_pivoted(u, v, &p.orientation_);
  p.graph_ = A;
  return p;
}

Plane4 Plane4::from_span(const Vec4& u, const Vec4& v) {
  Plane4 p;
  p.basis_ = orthonormalize_pivoted(u, v, &p.orientation_);
  return p;
}

LagrangianFlags classify_graph_plane(const Mat2& A, double eps) {
  const StructurePack& s = model();
  Vec4 u1, u2;
  u1 << 1, 0, A(0, 0), A(1, 0);
  u2 << 0, 1, A(0, 1), A(1, 1);

  // (a) the forms on the graph basis; (b) the det/tr/symmetry predicates.
  const double form_i = u1.dot(s.omega_i * u2);
  const double form_j = u1.dot(s.omega_j * u2);
  const double form_k = u1.dot(s.omega_k * u2);
  const double pred_i = A.determinant() - 1.0;
  const double pred_j = A.trace();
  const double pred_k = A(0, 1) - A(1, 0);

  LagrangianFlags by_form{std::abs(form_i) <= eps, std::abs(form_j) <= eps,
                          std::abs(form_k) <= eps};
  LagrangianFlags by_pred{std::abs(pred_i) <= eps, std::abs(pred_j) <= eps,
                          std::abs(pred_k) <= eps};
  if (by_form.omega_i != by_pred.omega_i || by_form.omega_j != by_pred.omega_j ||
      by_form.omega_k != by_pred.omega_k) {
    throw InternalInconsistency("lagrangian flags: form and predicate disagree");
  }
  return by_pred;
}

double calibration_residual(const Plane4& P, const Quat& x, const Quat& y,
                            const Quat& z) {
  const Quat triple[3] = {x, y, z};
  for (const Quat& q : triple) {
    if (!q.is_unit() || !q.is_imaginary()) throw BadTriple();
  }
  if (std::abs(inner(x, y)) > tol::kStructure ||
      std::abs(inner(y, z)) > tol::kStructure ||
      std::abs(inner(x, z)) > tol::kStructure) {
    throw BadTriple();
  }

  const Mat4 Jx = left_mult_matrix(x);
  const Mat4 Jy = left_mult_matrix(y);
  const Mat4 Jz = left_mult_matrix(z);

  const Mat42& B = P.basis();
  double worst = 0;
  for (int k = 0; k < 8; ++k) {
    const double th = k * (3.14159265358979323846 / 8.0);
    const Vec4 xi = std::cos(th) * B.col(0) + std::sin(th) * B.col(1);
    const Vec4 nu = -std::sin(th) * B.col(0) + std::cos(th) * B.col(1);
    const double wx = xi.dot(Jx * nu);
    const double wy = xi.dot(Jy * nu);
    const double wz = xi.dot(Jz * nu);
    // dA on an orthonormal pair of the plane is +-1.
    worst = std::max(worst, std::abs(1.0 - (wx * wx + wy * wy + wz * wz)));
  }
  return worst;
}

bool is_complex_line(const Plane4& P, const Mat4& Jmat, double eps) {
  const Mat4 Pi = P.projector();
  return (Jmat * Pi - Pi * Jmat).cwiseAbs().maxCoeff() <= eps;
}

bool is_complex_line(const Plane4& P, const Quat& x, double eps) {
  if (!x.is_unit() || !x.is_imaginary()) {
    throw NonUnitInput("is_complex_line needs a unit imaginary quaternion");
  }
  const bool by_commutation = is_complex_line(P, left_mult_matrix(x), eps);

  // Orthogonal companions y, z = x*y of x; P is J_x-complex iff omega_y and
  // omega_z vanish over P.
  const Quat seeds[3] = {Quat::i(), Quat::j(), Quat::k()};
  Quat y;
  double best = 2.0;
  for (const Quat& s : seeds) {
    const double align = std::abs(inner(s, x));
    if (align < best) {
      best = align;
      y = s;
    }
  }
  y = (y - inner(y, x) * x).normalized();
  const Quat z = x * y;

  const Mat42& B = P.basis();
  const double wy = B.col(0).dot(left_mult_matrix(y) * B.col(1));
  const double wz = B.col(0).dot(left_mult_matrix(z) * B.col(1));
  const bool by_lagrangian = std::abs(wy) <= eps && std::abs(wz) <= eps;

  if (by_commutation != by_lagrangian) {
    throw InternalInconsistency("complex-line criteria disagree");
  }
  return by_commutation;
}

LineSign classify_line(const Plane4& L) {
  const StructurePack& s = model();
  if (!is_complex_line(L, s.J)) throw NotComplexLine();

  const Mat42& B = L.basis();
  const double m11 = B.col(0).dot(s.m * B.col(0));
  const double m12 = B.col(0).dot(s.m * B.col(1));
  const double m22 = B.col(1).dot(s.m * B.col(1));
  const double eps = tol::kStructure;

  const bool null_by_m =
      std::abs(m11) <= eps && std::abs(m12) <= eps && std::abs(m22) <= eps;

  // L meets V iff pi_1 restricted to L is singular.
  Mat2 pi1;
  pi1 << B(0, 0), B(0, 1), B(1, 0), B(1, 1);
  const Eigen::JacobiSVD<Mat2> svd(pi1);
  const bool null_by_v = svd.singularValues()(1) <= tol::kImmersion;

  if (null_by_m != null_by_v) {
    throw InternalInconsistency("null-line criteria disagree");
  }
  if (null_by_m) return LineSign::Null;

  const double s1 = m11;
  const double s2 = m22;
  if (s1 > 0 && s2 > 0) return LineSign::Positive;
  if (s1 < 0 && s2 < 0) return LineSign::Negative;
  throw InternalInconsistency("m indefinite on a complex line");
}

Complex phi_space(const Vec4& v) {
  return Complex(v(0) + v(2), v(1) + v(3));
}

Complex psi_time(const Vec4& v) {
  return Complex(-v(0) + v(2), v(1) - v(3));
}

TauValue tau_invariant(const Plane4& L) {
  const StructurePack& s = model();
  if (!is_complex_line(L, s.J)) throw NotComplexLine();

  // Phi is complex-linear for (J, J0hat); asserted numerically.
  for (int c = 0; c < 2; ++c) {
    const Vec4 v = L.basis().col(c);
    const Vec4 Jv = s.J * v;
    const Complex rot(0, 1);
    if (std::abs(phi_space(Jv) - rot * phi_space(v)) > tol::kStructure ||
        std::abs(psi_time(Jv) - rot * psi_time(v)) > tol::kStructure) {
      throw InternalInconsistency("Phi is not complex-linear on this line");
    }
  }

  const Vec4 v = L.basis().col(0);
  const Complex ph = phi_space(v);
  const Complex ps = psi_time(v);
  if (std::abs(ph) <= tol::kTight * 10) {
    return {Complex(0, 0), true};
  }
  return {ps / ph, false};
}

std::pair<double, double> bilipschitz_ratio(const Plane4& P) {
  const StructurePack& s = model();
  const Mat42& B = P.basis();

  // m restricted to P, 64-point sweep plus eigenvalues.
  Mat2 mres;
  mres << B.col(0).dot(s.m * B.col(0)), B.col(0).dot(s.m * B.col(1)),
      B.col(1).dot(s.m * B.col(0)), B.col(1).dot(s.m * B.col(1));
  for (int k = 0; k < 64; ++k) {
    const double th = k * (2.0 * 3.14159265358979323846 / 64.0);
    const Vec2 c(std::cos(th), std::sin(th));
    if (c.dot(mres * c) < -tol::kStructure) throw NegativeDirectionPresent();
  }
  {
    const Eigen::SelfAdjointEigenSolver<Mat2> es(mres);
    if (es.eigenvalues()(0) < -tol::kStructure) throw NegativeDirectionPresent();
  }

  // |phi(v)|^2 = v^T Q v with Q = p p^T + q q^T.
  Vec4 p, q;
  p << 1, 0, 1, 0;
  q << 0, 1, 0, 1;
  const Mat4 Q = p * p.transpose() + q * q.transpose();
  const Mat2 R = B.transpose() * Q * B;
  const Eigen::SelfAdjointEigenSolver<Mat2> es(R);
  double lo = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  double hi = std::sqrt(std::max(0.0, es.eigenvalues()(1)));

  for (int k = 0; k < 64; ++k) {
    const double th = k * (2.0 * 3.14159265358979323846 / 64.0);
    const Vec4 v = std::cos(th) * B.col(0) + std::sin(th) * B.col(1);
    const double a = std::abs(phi_space(v));
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }

  if (lo < 1.0 - tol::kStructure || hi > std::sqrt(2.0) + tol::kStructure) {
    throw InternalInconsistency("bilipschitz bounds violated");
  }
  return {lo, hi};
}

}  // namespace maq
