#include "passmap/ransac.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "passmap/errors.hpp"

namespace passmap {

namespace {

constexpr int kMaxRefinements = 5;

bool all_collinear(std::span<const Point3> points) {
  const Point3& a = points[0];
  // Farthest point from a, then the largest triangle area with it.
  std::size_t far = 0;
  double best = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = (points[i] - a).squaredNorm();
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (best <= 0.0) return true;
  const Eigen::Vector3d axis = (points[far] - a).normalized();
  const double scale = std::sqrt(best);
  for (const auto& p : points) {
    const Eigen::Vector3d r = p - a;
    if ((r - r.dot(axis) * axis).norm() > 1e-9 * std::max(1.0, scale)) return false;
  }
  return true;
}

}  // namespace

void RansacConfig::validate() const {
  if (!(inlier_threshold > 0.0)) throw ConfigError("ransac.inlier_threshold must be > 0");
  if (max_iterations < 1) throw ConfigError("ransac.max_iterations must be >= 1");
  if (!(min_inlier_ratio > 0.0 && min_inlier_ratio <= 1.0)) {
    throw ConfigError("ransac.min_inlier_ratio must be in (0, 1]");
  }
}

PlaneParams fit_plane_least_squares(std::span<const Point3> points) {
  if (points.size() < 3) throw DegenerateInput("least-squares plane needs at least 3 points");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d r = p - mean;
    scatter.noalias() += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(scatter);
  // Eigenvalues ascend; a rank < 2 scatter means the points are collinear.
  if (es.eigenvalues()[1] <= 1e-12 * es.eigenvalues()[2]) {
    throw DegenerateInput("points are collinear");
  }
  return PlaneParams::through(mean, es.eigenvectors().col(0));
}

std::vector<std::uint32_t> points_within(std::span<const Point3> points, const PlaneParams& plane,
                                         double threshold) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(signed_distance(points[i], plane)) <= threshold) {
      out.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

PlaneFit fit_plane_ransac(std::span<const Point3> points, const RansacConfig& cfg) {
  cfg.validate();
  if (points.size() < 3) throw DegenerateInput("RANSAC needs at least 3 points");
  if (all_collinear(points)) throw DegenerateInput("all points are collinear");

  const std::size_t n = points.size();
  const double eps = cfg.inlier_threshold;
  const auto required =
      static_cast<std::size_t>(std::ceil(cfg.min_inlier_ratio * static_cast<double>(n) - 1e-9));

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::size_t best_count = 0;
  double best_residual = 0.0;
  PlaneParams best_plane;
  bool have_best = false;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const std::size_t i0 = pick(rng);
    const std::size_t i1 = pick(rng);
    const std::size_t i2 = pick(rng);
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;
    const Eigen::Vector3d normal =
        (points[i1] - points[i0]).cross(points[i2] - points[i0]);
    if (normal.norm() < 1e-12) continue;
    const PlaneParams hyp = PlaneParams::through(points[i0], normal);

    std::size_t count = 0;
    double residual = 0.0;
    for (const auto& p : points) {
      const double r = std::abs(signed_distance(p, hyp));
      if (r <= eps) {
        ++count;
        residual += r;
      }
    }
    if (count > best_count || (count == best_count && have_best && residual < best_residual)) {
      best_count = count;
      best_residual = residual;
      best_plane = hyp;
      have_best = true;
    }
  }

  if (!have_best || best_count < required || best_count < 3) {
    throw NoConsensus("no plane hypothesis reached the minimum inlier ratio");
  }

  PlaneParams plane = best_plane;
  std::vector<std::uint32_t> inliers = points_within(points, plane, eps);
  for (int k = 0; k < kMaxRefinements; ++k) {
    std::vector<Point3> support;
    support.reserve(inliers.size());
    for (auto i : inliers) support.push_back(points[i]);
    PlaneParams refined;
    try {
      refined = fit_plane_least_squares(support);
    } catch (const DegenerateInput&) {
      break;
    }
    auto next = points_within(points, refined, eps);
    if (next.size() < required || next.size() < 3) break;
    plane = refined;
    const bool stable = next == inliers;
    inliers = std::move(next);
    if (stable) break;
  }
  return {plane, std::move(inliers)};
}

}  // namespace passmap
