#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "passmap/geometry.hpp"

namespace passmap {

struct RansacConfig {
  double inlier_threshold = 0.03;  // epsilon, m
  int max_iterations = 200;
  double min_inlier_ratio = 0.5;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

struct PlaneFit {
  PlaneParams plane;
  std::vector<std::uint32_t> inliers;  // ascending indices into the input
};

// Total least squares plane through the points (smallest-eigenvalue direction
// of the scatter matrix). Throws DegenerateInput for < 3 points.
PlaneParams fit_plane_least_squares(std::span<const Point3> points);

// Indices of points with |signed distance| <= threshold, ascending.
std::vector<std::uint32_t> points_within(std::span<const Point3> points, const PlaneParams& plane,
                                         double threshold);

// 3-point RANSAC followed by iterated least-squares refinement on the inlier
// set. The returned inliers are exactly the points within epsilon of the
// returned plane. Deterministic for a fixed seed.
//
// Throws DegenerateInput (fewer than 3 points or all collinear) and
// NoConsensus (no hypothesis reaches min_inlier_ratio).
PlaneFit fit_plane_ransac(std::span<const Point3> points, const RansacConfig& cfg);

inline PlaneFit fit_plane_ransac(const PointCloud& cloud, const RansacConfig& cfg) {
  return fit_plane_ransac(std::span<const Point3>(cloud.points), cfg);
}

}  // namespace passmap
