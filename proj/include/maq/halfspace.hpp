#pragma once

#include "maq/common.hpp"

namespace maq {

// Upper half-space model of H^3: {z > 0} with metric (dx^2+dy^2+dz^2)/z^2.
struct HPoint {
  double x = 0, y = 0, z = 1;

  HPoint() = default;
  HPoint(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
    if (z <= 0) throw DomainViolation("half-space point needs z > 0");
  }
  explicit HPoint(const Vec3& v) : HPoint(v(0), v(1), v(2)) {}
  Vec3 vec() const { return Vec3(x, y, z); }
};

inline double hs_inner(const HPoint& p, const Vec3& u, const Vec3& v) {
  return u.dot(v) / (p.z * p.z);
}
inline double hs_norm(const HPoint& p, const Vec3& u) {
  return u.norm() / p.z;
}

// Gamma(u, v) of the conformal metric, Gamma^k_ij u^i v^j.
inline Vec3 christoffel(const HPoint& p, const Vec3& u, const Vec3& v) {
  const double iz = 1.0 / p.z;
  return Vec3(-(u(0) * v(2) + u(2) * v(0)) * iz,
              -(u(1) * v(2) + u(2) * v(1)) * iz,
              (u(0) * v(0) + u(1) * v(1) - u(2) * v(2)) * iz);
}

// Oriented wedge product: h(c, a ^ b) = dVol(c, a, b).
inline Vec3 wedge(const HPoint& p, const Vec3& a, const Vec3& b) {
  return a.cross(b) / p.z;
}

// --- Hyperboloid model bridge (closed-form geodesic operations) ---

// Minkowski product on R^{3,1}, signature (+,+,+,-).
inline double minkowski(const Vec4& u, const Vec4& v) {
  return u(0) * v(0) + u(1) * v(1) + u(2) * v(2) - u(3) * v(3);
}

Vec4 to_hyperboloid(const HPoint& p);
// Jacobian of the embedding; columns are the images of the coordinate axes.
Eigen::Matrix<double, 4, 3> hyperboloid_jacobian(const HPoint& p);
// Push a half-space tangent at p to the hyperboloid tangent space.
Vec4 push_tangent(const HPoint& p, const Vec3& u);
// Pull a hyperboloid tangent back to half-space coordinates.
Vec3 pull_tangent(const HPoint& p, const Vec4& U);

double hyp_distance(const HPoint& p, const HPoint& q);
// log_P(Q) in T_P of the hyperboloid; zero vector for coincident points.
Vec4 hyp_log(const Vec4& P, const Vec4& Q);
// Parallel transport of W in T_P to T_Q along the connecting geodesic.
Vec4 hyp_transport(const Vec4& P, const Vec4& Q, const Vec4& W);

// Complete geodesic: a vertical line or a half-circle orthogonal to the
// boundary plane, with unit-speed parametrization and a parallel orthonormal
// normal frame.
class GeodesicH3 {
 public:
  static GeodesicH3 vertical(double x0, double y0);
  static GeodesicH3 half_circle(const Vec2& center, double radius, const Vec2& dir);

  HPoint point(double s) const;
  Vec3 tangent(double s) const;                 // unit hyperbolic
  std::pair<Vec3, Vec3> normal_frame(double s) const;
  bool is_vertical() const { return vertical_; }

 private:
  bool vertical_ = true;
  double x0_ = 0, y0_ = 0;        // vertical line
  Vec2 center_ = Vec2::Zero();    // half-circle
  double radius_ = 1;
  Vec2 dir_ = Vec2::UnitX();
};

}  // namespace maq
