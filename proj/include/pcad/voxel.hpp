#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pcad/types.hpp"

namespace pcad {

inline constexpr double kDefaultVoxelSize = 0.03;

// Quantized grid over a cloud with the bidirectional voxel/point index.
// Voxel ids follow first appearance in point order.
struct VoxelGrid {
  double voxel_size = 0.0;
  std::vector<std::array<std::int64_t, 3>> voxel_coords;  // unique, N_V rows
  std::vector<int> point_to_voxel;                        // N entries
  std::vector<std::vector<int>> voxel_to_points;          // N_V lists

  int voxel_count() const { return static_cast<int>(voxel_coords.size()); }
};

// Componentwise floor(p / voxel_size).
VoxelGrid voxelize(const PointCloud& cloud, double voxel_size);

}  // namespace pcad
