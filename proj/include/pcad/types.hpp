#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace pcad {

using Vec3 = Eigen::Vector3d;

// Exit-code families used by the CLI: usage errors are handled by the
// argument parser; these two map to exit codes 2 and 3.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// N points with optional per-point unit normals. Immutable by convention:
// transforms return new clouds.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty or same size as points
  std::string category;

  int size() const { return static_cast<int>(points.size()); }
  bool has_normals() const { return !normals.empty(); }
};

// Throws data_error unless: N >= 1, all coordinates finite, and any
// normals are unit length within 1e-6.
void validate(const PointCloud& cloud);

Vec3 centroid(const PointCloud& cloud);

}  // namespace pcad
