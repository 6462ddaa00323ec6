#include "passmap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passmap/errors.hpp"

namespace passmap {

UnitVec3::UnitVec3(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DegenerateInput("cannot normalize a zero or non-finite direction");
  }
  v_ = v / n;
}

UnitVec3 UnitVec3::operator-() const { return UnitVec3(Raw{}, -v_); }

void canonicalize(Eigen::Vector3d& n, double& d) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n[i]) > std::abs(n[axis])) axis = i;
  }
  if (n[axis] < 0.0) {
    n = -n;
    d = -d;
  }
}

PlaneParams::PlaneParams(const UnitVec3& normal, double offset) {
  Eigen::Vector3d n = normal.vec();
  canonicalize(n, offset);
  normal_ = UnitVec3(n);
  offset_ = offset;
}

PlaneParams PlaneParams::through(const Point3& point, const Eigen::Vector3d& normal) {
  const UnitVec3 n(normal);
  return PlaneParams(n, -n.dot(point));
}

Point3 PlaneParams::project(const Point3& p) const {
  return p - signed_distance(p, *this) * normal_.vec();
}

PlaneParams PlaneParams::transformed(const Eigen::Isometry3d& T) const {
  const Eigen::Vector3d n = T.linear() * normal_.vec();
  return PlaneParams::through(T * origin_point(), n);
}

PlaneParams canonicalize(const PlaneParams& plane) {
  return PlaneParams(plane.normal(), plane.offset());
}

double signed_distance(const Point3& p, const PlaneParams& plane) {
  return plane.normal().dot(p) + plane.offset();
}

double plane_angle(const PlaneParams& a, const PlaneParams& b) {
  const double c = std::clamp(std::abs(a.normal().dot(b.normal().vec())), 0.0, 1.0);
  return std::acos(c);
}

Point3 reflect(const Point3& p, const PlaneParams& plane) {
  return p - 2.0 * signed_distance(p, plane) * plane.normal().vec();
}

Vec2 InPlaneBasis::to_2d(const Point3& p) const {
  const Eigen::Vector3d r = p - origin;
  return {r.dot(across), r.dot(up)};
}

Point3 InPlaneBasis::to_3d(const Vec2& q) const { return origin + q.x() * across + q.y() * up; }

bool is_near_horizontal_plane(const PlaneParams& plane, double tolerance_deg) {
  const double tilt = std::acos(std::clamp(std::abs(plane.normal().z()), 0.0, 1.0));
  return tilt < tolerance_deg * M_PI / 180.0;
}

InPlaneBasis make_basis(const PlaneParams& plane) {
  InPlaneBasis b;
  b.normal = plane.normal().vec();
  b.origin = plane.origin_point();
  Eigen::Vector3d ref = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d up = ref - ref.dot(b.normal) * b.normal;
  if (up.norm() < 1e-6 || is_near_horizontal_plane(plane)) {
    ref = Eigen::Vector3d::UnitX();
    up = ref - ref.dot(b.normal) * b.normal;
  }
  b.up = up.normalized();
  b.across = b.normal.cross(b.up);
  return b;
}

void Box2::expand(const Vec2& p) {
  if (!valid) {
    min = max = p;
    valid = true;
    return;
  }
  min = min.cwiseMin(p);
  max = max.cwiseMax(p);
}

double Box2::separation(const Box2& o) const {
  if (!valid || !o.valid) return std::numeric_limits<double>::infinity();
  double gap = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double g = std::max(o.min[i] - max[i], min[i] - o.max[i]);
    gap = std::max(gap, g);
  }
  return gap;
}

Box2 projected_bounds(const std::vector<Point3>& points, const InPlaneBasis& basis) {
  Box2 box;
  for (const auto& p : points) box.expand(basis.to_2d(p));
  return box;
}

bool all_finite(const Point3& p) { return p.allFinite(); }

}  // namespace passmap
