#include "pcad/voxel.hpp"

#include <cmath>
#include <unordered_map>

namespace pcad {

namespace {

struct CoordHash {
  size_t operator()(const std::array<std::int64_t, 3>& c) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto v : c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

}  // namespace

VoxelGrid voxelize(const PointCloud& cloud, double voxel_size) {
  validate(cloud);
  if (!(voxel_size > 0.0)) {
    throw data_error("voxel size must be positive");
  }

  VoxelGrid grid;
  grid.voxel_size = voxel_size;
  grid.point_to_voxel.resize(cloud.points.size());

  std::unordered_map<std::array<std::int64_t, 3>, int, CoordHash> seen;
  seen.reserve(cloud.points.size());
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const std::array<std::int64_t, 3> coord = {
        static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
    auto [it, inserted] = seen.emplace(coord, grid.voxel_count());
    if (inserted) {
      grid.voxel_coords.push_back(coord);
      grid.voxel_to_points.emplace_back();
    }
    grid.point_to_voxel[i] = it->second;
    grid.voxel_to_points[it->second].push_back(static_cast<int>(i));
  }
  return grid;
}

}  // namespace pcad
