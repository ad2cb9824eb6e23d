#include "pcad/types.hpp"

#include <cmath>

namespace pcad {

void validate(const PointCloud& cloud) {
  if (cloud.points.empty()) {
    throw data_error("point cloud is empty");
  }
  for (const auto& p : cloud.points) {
    if (!p.allFinite()) {
      throw data_error("point cloud contains non-finite coordinates");
    }
  }
  if (!cloud.normals.empty()) {
    if (cloud.normals.size() != cloud.points.size()) {
      throw data_error("normal count does not match point count");
    }
    for (const auto& n : cloud.normals) {
      if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-6) {
        throw data_error("normals must be unit length");
      }
    }
  }
}

Vec3 centroid(const PointCloud& cloud) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : cloud.points) {
    c += p;
  }
  return c / static_cast<double>(cloud.points.size());
}

}  // namespace pcad
