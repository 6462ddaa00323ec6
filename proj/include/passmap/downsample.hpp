#pragma once

#include "passmap/geometry.hpp"

namespace passmap {

// Voxel-grid downsampling (one centroid per occupied cell) followed by a
// range gate around `origin`. Output order follows the voxel index order, so
// the result does not depend on the input ordering beyond floating-point
// summation. Precondition: voxel > 0, max_range > 0.
PointCloud downsample_and_range_filter(const PointCloud& cloud, double voxel, double max_range,
                                       const Point3& origin);

}  // namespace passmap
