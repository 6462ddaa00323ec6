#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "passmap/geometry.hpp"

namespace passmap {

enum class SemanticClass : std::uint8_t { Other = 0, Wall = 1, Door = 2, Ground = 3 };

std::string_view to_string(SemanticClass c);
std::optional<SemanticClass> semantic_class_from_int(long v);

struct SemanticLabel {
  SemanticClass class_id = SemanticClass::Other;
  std::uint32_t instance_id = 0;  // 0 = no instance

  bool operator==(const SemanticLabel&) const = default;
};

struct LabeledPointCloud {
  PointCloud points;
  std::vector<SemanticLabel> labels;  // same length as points

  std::size_t size() const { return points.size(); }
  bool consistent() const { return labels.size() == points.size(); }
};

// Camera-to-global rigid transform; the camera center c_t is the translation.
class CameraPose {
 public:
  CameraPose() = default;
  // Projects `rotation` onto the nearest rotation unless it is already
  // orthonormal to roundoff (kept bit for bit). Callers are expected to have
  // checked orthogonality_error() first when the input is untrusted.
  CameraPose(const Eigen::Matrix3d& rotation, const Point3& center);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Point3& center() const { return center_; }
  Point3 to_global(const Point3& p_camera) const { return rotation_ * p_camera + center_; }
  Point3 to_camera(const Point3& p_global) const {
    return rotation_.transpose() * (p_global - center_);
  }
  Eigen::Isometry3d isometry() const;

  // max |R^T R - I| entry; infinite for non-finite input.
  static double orthogonality_error(const Eigen::Matrix3d& r);
  static Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& r);

  bool operator==(const CameraPose& o) const {
    return rotation_ == o.rotation_ && center_ == o.center_;
  }

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Point3 center_ = Point3::Zero();
};

// Points are stored in the camera frame, exactly as read from disk.
struct KeyFrame {
  std::int64_t id = 0;
  double timestamp = 0.0;
  CameraPose pose;
  LabeledPointCloud cloud;
};

// Per-instance subsets of one semantic class, ordered by instance id.
struct InstanceSubset {
  std::uint32_t instance_id = 0;
  PointCloud points;
};

// Splits the keyframe's points of class `cls` by instance id, dropping
// instances smaller than `min_points`. Points keep the frame of `kf.cloud`.
std::vector<InstanceSubset> extract_class_subset(const KeyFrame& kf, SemanticClass cls,
                                                 std::size_t min_points = 50);

}  // namespace passmap
