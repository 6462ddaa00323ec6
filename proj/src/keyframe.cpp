#include "passmap/keyframe.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>

namespace passmap {

std::string_view to_string(SemanticClass c) {
  switch (c) {
    case SemanticClass::Other:
      return "Other";
    case SemanticClass::Wall:
      return "Wall";
    case SemanticClass::Door:
      return "Door";
    case SemanticClass::Ground:
      return "Ground";
  }
  return "Other";
}

std::optional<SemanticClass> semantic_class_from_int(long v) {
  if (v < 0 || v > 3) return std::nullopt;
  return static_cast<SemanticClass>(v);
}

CameraPose::CameraPose(const Eigen::Matrix3d& rotation, const Point3& center)
    : rotation_(orthogonality_error(rotation) <= 1e-12 && rotation.determinant() > 0.0 ? rotation
                                                                                      : nearest_rotation(rotation)),
      center_(center) {}

Eigen::Isometry3d CameraPose::isometry() const {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() = rotation_;
  T.translation() = center_;
  return T;
}

double CameraPose::orthogonality_error(const Eigen::Matrix3d& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Matrix3d CameraPose::nearest_rotation(const Eigen::Matrix3d& r) {
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0 &&
      r.determinant() > 0.0) {
    return r;
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

std::vector<InstanceSubset> extract_class_subset(const KeyFrame& kf, SemanticClass cls,
                                                 std::size_t min_points) {
  std::map<std::uint32_t, PointCloud> groups;
  const auto& pts = kf.cloud.points.points;
  const auto& labels = kf.cloud.labels;
  for (std::size_t i = 0; i < pts.size() && i < labels.size(); ++i) {
    if (labels[i].class_id != cls) continue;
    groups[labels[i].instance_id].points.push_back(pts[i]);
  }
  std::vector<InstanceSubset> out;
  for (auto& [id, cloud] : groups) {
    if (cloud.size() < min_points) continue;
    out.push_back({id, std::move(cloud)});
  }
  return out;
}

}  // namespace passmap
