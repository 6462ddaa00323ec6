#pragma once

// Reference computations written independently of the library, used to check
// it. None of these call into passmap beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace passmap::oracle {

struct Plane {
  Eigen::Vector3d n;
  double d;
};

// Total least squares via SVD of the centered data matrix.
inline Plane tls_plane(const std::vector<Eigen::Vector3d>& pts) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::MatrixXd a(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = (pts[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::Vector3d n = svd.matrixV().col(2).normalized();
  return {n, -n.dot(mean)};
}

// Angle between plane normals ignoring orientation, radians.
inline double normal_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), std::abs(a.dot(b)));
}

// Offset of plane b measured with a's orientation.
inline double offset_gap(const Plane& a, const Plane& b) {
  const double s = a.n.dot(b.n) < 0 ? -1.0 : 1.0;
  return std::abs(a.d - s * b.d);
}

// Flip so the component with the largest magnitude is positive (first index
// on ties).
inline Plane canonical(Plane p) {
  int k = 0;
  if (std::abs(p.n.y()) > std::abs(p.n[k])) k = 1;
  if (std::abs(p.n.z()) > std::abs(p.n[k])) k = 2;
  if (p.n[k] < 0) {
    p.n = -p.n;
    p.d = -p.d;
  }
  return p;
}

// The two-inequality coplanarity test on canonically oriented planes.
inline bool coplanar(const Plane& door, const Plane& wall, double tau_theta, double tau_d) {
  const Plane a = canonical(door);
  const Plane b = canonical(wall);
  return normal_angle(a.n, b.n) < tau_theta && std::abs(a.d - b.d) < tau_d;
}

// Intersection of the line through p0, p1 with n.x + d = 0.
inline Eigen::Vector3d line_plane(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& n,
                                  double d) {
  const Eigen::Vector3d dir = p1 - p0;
  const double t = -(n.dot(p0) + d) / n.dot(dir);
  return p0 + t * dir;
}

struct Matching {
  std::size_t pairs = 0;
  double cost = 0.0;
};

// Exhaustive search over all partial one-to-one matchings: most pairs first,
// then least cost.
inline Matching brute_force_matching(const std::vector<std::vector<std::optional<double>>>& cost) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows ? cost[0].size() : 0;
  Matching best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<char> used(cols, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t pairs, double total) -> void {
    if (i == rows) {
      if (pairs > best.pairs || (pairs == best.pairs && total < best.cost)) best = {pairs, total};
      return;
    }
    self(self, i + 1, pairs, total);
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j] || !cost[i][j]) continue;
      used[j] = 1;
      self(self, i + 1, pairs + 1, total + *cost[i][j]);
      used[j] = 0;
    }
  };
  rec(rec, 0, 0, 0.0);
  if (best.pairs == 0) best.cost = 0.0;
  return best;
}

}  // namespace passmap::oracle
