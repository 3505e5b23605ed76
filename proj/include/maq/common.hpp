#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace maq {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Complex = std::complex<double>;

// Tolerance ladder. Structure predicates (unit norm, imaginarity, matrix
// equality) assume O(1) inputs; callers normalize first.
namespace tol {
inline constexpr double kTight = 1e-12;
inline constexpr double kStructure = 1e-10;
inline constexpr double kImmersion = 1e-8;
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define MAQ_DEFINE_ERROR(Name)                                   \
  struct Name : Error {                                          \
    explicit Name(const std::string& msg = #Name) : Error(msg) {} \
  }

MAQ_DEFINE_ERROR(NonImaginaryInput);
MAQ_DEFINE_ERROR(NonUnitInput);
MAQ_DEFINE_ERROR(BadTriple);
MAQ_DEFINE_ERROR(NotComplexLine);
MAQ_DEFINE_ERROR(NegativeDirectionPresent);
MAQ_DEFINE_ERROR(InternalInconsistency);
MAQ_DEFINE_ERROR(GridTooSmall);
MAQ_DEFINE_ERROR(RankDeficientFit);
MAQ_DEFINE_ERROR(DomainViolation);
MAQ_DEFINE_ERROR(LinearSolveFailure);
MAQ_DEFINE_ERROR(DegenerateImmersion);
MAQ_DEFINE_ERROR(NonUnitVector);
MAQ_DEFINE_ERROR(BadParameter);
MAQ_DEFINE_ERROR(NotAGraph);
MAQ_DEFINE_ERROR(ConfigInvalid);
MAQ_DEFINE_ERROR(IoFailure);

#undef MAQ_DEFINE_ERROR

}  // namespace maq
