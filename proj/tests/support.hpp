#pragma once

// Random generators and small fixtures shared by the test suites.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "passmap/geometry.hpp"
#include "passmap/keyframe.hpp"
#include "passmap/structural.hpp"

namespace passmap::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  Eigen::Vector3d unit_vector() {
    Eigen::Vector3d v;
    do {
      v = {normal(1.0), normal(1.0), normal(1.0)};
    } while (v.norm() < 1e-6);
    return v.normalized();
  }
  Point3 point(double extent) { return {uniform(-extent, extent), uniform(-extent, extent), uniform(-extent, extent)}; }

  // Unit vector orthogonal to n.
  Eigen::Vector3d orthogonal(const Eigen::Vector3d& n) {
    Eigen::Vector3d v;
    do {
      v = unit_vector();
      v -= v.dot(n) * n;
    } while (v.norm() < 1e-3);
    return v.normalized();
  }

  // n rotated by exactly `angle` radians about a random axis orthogonal to it.
  Eigen::Vector3d tilt(const Eigen::Vector3d& n, double angle) {
    const Eigen::Vector3d axis = orthogonal(n);
    return Eigen::AngleAxisd(angle, axis) * n;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Points sampled on a width x height patch of the plane through `center`
// spanned by orthonormal u, v.
inline std::vector<Point3> patch(Gen& g, const Point3& center, const Eigen::Vector3d& u, const Eigen::Vector3d& v,
                                 double width, double height, std::size_t n, double sigma = 0.0,
                                 const Eigen::Vector3d& normal = Eigen::Vector3d::Zero()) {
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point3 p = center + g.uniform(-width / 2, width / 2) * u + g.uniform(-height / 2, height / 2) * v;
    if (sigma > 0.0) p += g.normal(sigma) * normal;
    pts.push_back(p);
  }
  return pts;
}

// Vertical wall x = x0 spanning y in [y0, y1], z in [0, h], sampled on a
// jittered grid; `hole` points (y, z box) are skipped.
inline Wall grid_wall(EntityId id, double x0, double y0, double y1, double h, double step,
                      const Box2* hole = nullptr) {
  Gen g(static_cast<std::uint64_t>(id) + 1000);
  Wall w;
  w.id = id;
  w.plane = PlaneParams(Eigen::Vector3d(1.0, 0.0, 0.0), -x0);
  const int ny = static_cast<int>(std::floor((y1 - y0) / step));
  const int nz = static_cast<int>(std::floor(h / step));
  for (int i = 0; i < ny; ++i) {
    for (int k = 0; k < nz; ++k) {
      const double y = y0 + (i + 0.5 + g.uniform(-0.3, 0.3)) * step;
      const double z = (k + 0.5 + g.uniform(-0.3, 0.3)) * step;
      if (hole && y > hole->min.x() && y < hole->max.x() && z > hole->min.y() && z < hole->max.y()) continue;
      w.inliers.points.emplace_back(x0, y, z);
    }
  }
  w.observing_keyframes = {0};
  refresh_geometry(w);
  return w;
}

// Camera looking along `forward` (horizontal) from `center`.
inline CameraPose look(const Point3& center, const Eigen::Vector3d& forward) {
  const Eigen::Vector3d f = forward.normalized();
  const Eigen::Vector3d down(0.0, 0.0, -1.0);
  Eigen::Matrix3d r;
  r.col(0) = down.cross(f);
  r.col(1) = down;
  r.col(2) = f;
  return CameraPose(r, center);
}

// Keyframe whose cloud holds `global` points (converted to the camera frame)
// labeled with one class and instance.
inline KeyFrame keyframe_with(std::int64_t id, const CameraPose& pose, const std::vector<Point3>& global,
                              SemanticClass cls, std::uint32_t instance) {
  KeyFrame kf;
  kf.id = id;
  kf.timestamp = 0.1 * static_cast<double>(id);
  kf.pose = pose;
  for (const auto& p : global) {
    kf.cloud.points.points.push_back(pose.to_camera(p));
    kf.cloud.labels.push_back({cls, instance});
  }
  return kf;
}

inline void append(KeyFrame& kf, const std::vector<Point3>& global, SemanticClass cls, std::uint32_t instance) {
  for (const auto& p : global) {
    kf.cloud.points.points.push_back(kf.pose.to_camera(p));
    kf.cloud.labels.push_back({cls, instance});
  }
}

}  // namespace passmap::testing
