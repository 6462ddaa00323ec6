#include "passmap/downsample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "passmap/errors.hpp"

namespace passmap {

PointCloud downsample_and_range_filter(const PointCloud& cloud, double voxel, double max_range,
                                       const Point3& origin) {
  if (!(voxel > 0.0)) throw ConfigError("voxel size must be > 0");
  if (!(max_range > 0.0)) throw ConfigError("max_range must be > 0");

  using Key = std::array<std::int64_t, 3>;
  std::vector<std::pair<Key, std::uint32_t>> keyed;
  keyed.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    keyed.push_back({{static_cast<std::int64_t>(std::floor(p.x() / voxel)),
                      static_cast<std::int64_t>(std::floor(p.y() / voxel)),
                      static_cast<std::int64_t>(std::floor(p.z() / voxel))},
                     static_cast<std::uint32_t>(i)});
  }
  std::sort(keyed.begin(), keyed.end());

  PointCloud out;
  const double r2 = max_range * max_range;
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    while (j < keyed.size() && keyed[j].first == keyed[i].first) {
      sum += cloud.points[keyed[j].second];
      ++j;
    }
    const Point3 c = sum / static_cast<double>(j - i);
    if ((c - origin).squaredNorm() <= r2) out.points.push_back(c);
    i = j;
  }
  return out;
}

}  // namespace passmap
