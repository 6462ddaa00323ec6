#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace passmap {

// Points live in the global map frame, meters.
using Point3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Direction with Euclidean norm 1. Construction normalizes; a zero vector is
// rejected with DegenerateInput.
class UnitVec3 {
 public:
  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Eigen::Vector3d& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Eigen::Vector3d(x, y, z)) {}

  const Eigen::Vector3d& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const Eigen::Vector3d& o) const { return v_.dot(o); }
  UnitVec3 operator-() const;

  bool operator==(const UnitVec3& o) const { return v_ == o.v_; }

 private:
  struct Raw {};
  UnitVec3(Raw, const Eigen::Vector3d& v) : v_(v) {}
  Eigen::Vector3d v_;
};

// Plane n·p + d = 0 in canonical orientation: the normal's component with the
// largest magnitude is positive (first such axis wins ties).
class PlaneParams {
 public:
  PlaneParams() = default;
  PlaneParams(const UnitVec3& normal, double offset);
  PlaneParams(const Eigen::Vector3d& normal, double offset)
      : PlaneParams(UnitVec3(normal), offset) {}

  // Plane through `point` with the given normal.
  static PlaneParams through(const Point3& point, const Eigen::Vector3d& normal);

  const UnitVec3& normal() const { return normal_; }
  double offset() const { return offset_; }
  Eigen::Vector4d coeffs() const {
    return {normal_.x(), normal_.y(), normal_.z(), offset_};
  }

  Point3 project(const Point3& p) const;
  // Foot of the perpendicular from the origin.
  Point3 origin_point() const { return -offset_ * normal_.vec(); }

  PlaneParams transformed(const Eigen::Isometry3d& T) const;

  bool operator==(const PlaneParams& o) const {
    return normal_ == o.normal_ && offset_ == o.offset_;
  }

 private:
  UnitVec3 normal_;
  double offset_ = 0.0;
};

// Returns (n, d) flipped so the largest-magnitude normal component is positive.
void canonicalize(Eigen::Vector3d& n, double& d);
PlaneParams canonicalize(const PlaneParams& plane);

double signed_distance(const Point3& p, const PlaneParams& plane);

// Angle between the plane normals, ignoring orientation, in [0, pi/2].
double plane_angle(const PlaneParams& a, const PlaneParams& b);

Point3 reflect(const Point3& p, const PlaneParams& plane);

// Right-handed in-plane frame attached to a plane: `up` is the projection of
// global +z onto the plane (height axis), `across` = normal x up (width axis).
struct InPlaneBasis {
  Point3 origin;
  Eigen::Vector3d normal;
  Eigen::Vector3d up;
  Eigen::Vector3d across;

  // (across, up) coordinates: x = width axis, y = height axis.
  Vec2 to_2d(const Point3& p) const;
  Point3 to_3d(const Vec2& q) const;
};

// True when the normal is within `tolerance_deg` of vertical (floor/ceiling).
bool is_near_horizontal_plane(const PlaneParams& plane, double tolerance_deg = 5.0);
// For near-horizontal planes the height axis falls back to global +x.
InPlaneBasis make_basis(const PlaneParams& plane);

// Axis-aligned box in the (width, height) coordinates of an InPlaneBasis.
struct Box2 {
  Vec2 min{0.0, 0.0};
  Vec2 max{0.0, 0.0};
  bool valid = false;

  void expand(const Vec2& p);
  Vec2 extent() const { return valid ? Vec2(max - min) : Vec2(0.0, 0.0); }
  Vec2 center() const { return 0.5 * (min + max); }
  // Gap between two boxes along each axis (0 when overlapping); max of both.
  double separation(const Box2& o) const;
  bool operator==(const Box2& o) const = default;
};

Box2 projected_bounds(const std::vector<Point3>& points, const InPlaneBasis& basis);

bool all_finite(const Point3& p);

}  // namespace passmap
