#pragma once

#include <optional>
#include <utility>

#include "maq/common.hpp"
#include "maq/quaternion.hpp"

namespace maq {

// The explicit model on C (+) C = R^2 (+) R^2, coordinates (x1, x2, x3, x4)
// with z = x1 + i x2, w = x3 + i x4.
struct StructurePack {
  Mat2 J0;              // multiplication by i on R^2
  Mat4 I, J, K;         // compatible quaternionic structure
  Mat4 J0hat;           // diag(J0, J0), commutes with I, J, K
  Mat4 g;               // standard metric
  Mat4 omega_i, omega_j, omega_k;  // Gram matrices; omega_x(u,v) = u^T X v
  Mat4 m;               // symmetric form vanishing on the vertical plane
  Mat42 V;              // basis of V = {0} (+) R^2
};

const StructurePack& model();

// Norm on symmetric bilinear forms: Frobenius norm of the 4x4 Gram matrix
// divided by the Gram norm of m itself (= 2), so the model's m has unit norm.
inline constexpr double kFormNormDivisor = 2.0;
inline double form_norm(const Mat4& gram) { return gram.norm() / kFormNormDivisor; }

// Oriented 2-plane in R^4. Canonical orthonormal basis is produced by
// Gram-Schmidt with first-vector pivoting on the largest component.
class Plane4 {
 public:
  static Plane4 graph_of(const Mat2& A);
  static Plane4 from_span(const Vec4& u, const Vec4& v);

  const Mat42& basis() const { return basis_; }
  int orientation() const { return orientation_; }
  Mat4 projector() const { return basis_ * basis_.transpose(); }
  const std::optional<Mat2>& graph() const { return graph_; }

 private:
  Mat42 basis_ = Mat42::Zero();
  int orientation_ = +1;
  std::optional<Mat2> graph_;
};

struct LagrangianFlags {
  bool omega_i = false;
  bool omega_j = false;
  bool omega_k = false;
};

// Each flag is computed both by direct vanishing of the form on the graph
// basis and by the det/tr/symmetry predicate; disagreement throws
// InternalInconsistency.
LagrangianFlags classify_graph_plane(const Mat2& A, double eps = tol::kStructure);

// max |dA(xi,nu)^2 - omega_x^2 - omega_y^2 - omega_z^2| over orthonormal
// bases of the plane, for the left structures of an orthonormal imaginary
// triple. Identically ~0 for every plane.
double calibration_residual(const Plane4& P, const Quat& x, const Quat& y,
                            const Quat& z);

// Invariance of the plane under an arbitrary complex-structure matrix
// (projector commutation test).
bool is_complex_line(const Plane4& P, const Mat4& Jmat,
                     double eps = tol::kStructure);
// J_x = h(x,1) variant, cross-checked against the lagrangian criterion for
// two orthogonal companions of x.
bool is_complex_line(const Plane4& P, const Quat& x,
                     double eps = tol::kStructure);

enum class LineSign { Positive, Negative, Null };

// Sign of m restricted to a J-complex line; Null iff the line meets the
// vertical plane. Both characterisations are evaluated and must agree.
LineSign classify_line(const Plane4& L);

struct TauValue {
  Complex value{0, 0};
  bool at_infinity = false;
  double abs() const {
    return at_infinity ? std::numeric_limits<double>::infinity()
                       : std::abs(value);
  }
};

// Conformal invariant of a J-complex line: Phi(L) = [phi : psi] in CP^1,
// tau = psi/phi. |tau| < 1, = 1, > 1 for positive, null, negative lines.
TauValue tau_invariant(const Plane4& L);

// (min, max) of |phi(v)| over unit vectors of P, requires m|_P >= 0.
// Guaranteed inside [1, sqrt(2)].
std::pair<double, double> bilipschitz_ratio(const Plane4& P);

// phi(z,w) = z + w and psi(z,w) = -conj(z) + conj(w) as complex values.
Complex phi_space(const Vec4& v);
Complex psi_time(const Vec4& v);

}  // namespace maq
