#include "maq/halfspace.hpp"

#include <cmath>

namespace maq {

Vec4 to_hyperboloid(const HPoint& p) {
  const double s = p.x * p.x + p.y * p.y + p.z * p.z;
  return Vec4(p.x / p.z, p.y / p.z, (s - 1) / (2 * p.z), (s + 1) / (2 * p.z));
}

Eigen::Matrix<double, 4, 3> hyperboloid_jacobian(const HPoint& p) {
  const double z = p.z, z2 = z * z;
  const double rho2 = p.x * p.x + p.y * p.y;
  Eigen::Matrix<double, 4, 3> J;
  J << 1 / z, 0, -p.x / z2,
       0, 1 / z, -p.y / z2,
       p.x / z, p.y / z, (z2 - rho2 + 1) / (2 * z2),
       p.x / z, p.y / z, (z2 - rho2 - 1) / (2 * z2);
  return J;
}

Vec4 push_tangent(const HPoint& p, const Vec3& u) {
  return hyperboloid_jacobian(p) * u;
}

Vec3 pull_tangent(const HPoint& p, const Vec4& U) {
  const Eigen::Matrix<double, 4, 3> J = hyperboloid_jacobian(p);
  return (J.transpose() * J).ldlt().solve(J.transpose() * U);
}

double hyp_distance(const HPoint& p, const HPoint& q) {
  const double c = -minkowski(to_hyperboloid(p), to_hyperboloid(q));
  return std::acosh(std::max(1.0, c));
}

Vec4 hyp_log(const Vec4& P, const Vec4& Q) {
  const double c = std::max(1.0, -minkowski(P, Q));
  const double d = std::acosh(c);
  if (d < 1e-14) return Vec4::Zero();
  return d * (Q - c * P) / std::sinh(d);
}

Vec4 hyp_transport(const Vec4& P, const Vec4& Q, const Vec4& W) {
  const double ip = minkowski(P, Q);  // = -cosh(d)
  const double denom = 1.0 - ip;
  if (std::abs(denom) < 1e-300) throw Error("transport between antipodal-like points");
  return W + (minkowski(Q, W) / denom) * (P + Q);
}

GeodesicH3 GeodesicH3::vertical(double x0, double y0) {
  GeodesicH3 g;
  g.vertical_ = true;
  g.x0_ = x0;
  g.y0_ = y0;
  return g;
}

GeodesicH3 GeodesicH3::half_circle(const Vec2& center, double radius,
                                   const Vec2& dir) {
  if (radius <= 0) throw BadParameter("geodesic half-circle needs radius > 0");
  GeodesicH3 g;
  g.vertical_ = false;
  g.center_ = center;
  g.radius_ = radius;
  g.dir_ = dir.normalized();
  return g;
}

HPoint GeodesicH3::point(double s) const {
  if (vertical_) return HPoint(x0_, y0_, std::exp(s));
  const double t = std::tanh(s), sech = 1.0 / std::cosh(s);
  const Vec2 base = center_ + radius_ * t * dir_;
  return HPoint(base(0), base(1), radius_ * sech);
}

Vec3 GeodesicH3::tangent(double s) const {
  if (vertical_) return Vec3(0, 0, std::exp(s));
  const double sech = 1.0 / std::cosh(s), t = std::tanh(s);
  return Vec3(radius_ * sech * sech * dir_(0), radius_ * sech * sech * dir_(1),
              -radius_ * sech * t);
}

std::pair<Vec3, Vec3> GeodesicH3::normal_frame(double s) const {
  if (vertical_) {
    const double z = std::exp(s);
    return {Vec3(z, 0, 0), Vec3(0, z, 0)};
  }
  const double sech = 1.0 / std::cosh(s), t = std::tanh(s);
  const double z = radius_ * sech;
  // In-plane normal to the half-circle, and the horizontal direction
  // perpendicular to its vertical plane; both parallel along the geodesic.
  const Vec3 in_plane(z * t * dir_(0), z * t * dir_(1), z * sech);
  const Vec3 perp(-z * dir_(1), z * dir_(0), 0);
  return {in_plane, perp};
}

}  // namespace maq
