#pragma once

#include <vector>

#include "pcad/types.hpp"

namespace pcad {

// Exact k-nearest-neighbor index over a subset of a cloud's points.
// Queries return original point indices sorted by nondecreasing distance,
// ties broken by lower index; results match an exhaustive scan exactly.
// Immutable after construction.
class KnnIndex {
 public:
  explicit KnnIndex(const PointCloud& cloud);
  KnnIndex(const PointCloud& cloud, std::vector<int> subset);

  // Returns min(k, subset size) indices. k >= 1.
  std::vector<int> query(const Vec3& q, int k) const;
  void query(const Vec3& q, int k, std::vector<int>& out) const;

  // Buffer-reusing variant for query loops.
  struct Scratch {
    std::vector<std::pair<double, int>> heap;
  };
  void query(const Vec3& q, int k, Scratch& scratch,
             std::vector<int>& out) const;

  int subset_size() const { return static_cast<int>(items_.size()); }

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    Vec3 lo = Vec3::Zero();  // tight bounding box for pruning
    Vec3 hi = Vec3::Zero();
  };

  void finish_build();
  int build(int begin, int end);
  void search(int node, const Vec3& q, int k,
              std::vector<std::pair<double, int>>& heap) const;

  const PointCloud* cloud_;
  std::vector<int> items_;  // point indices, permuted into kd order
  std::vector<double> xs_, ys_, zs_;  // coordinates in kd order
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace pcad
