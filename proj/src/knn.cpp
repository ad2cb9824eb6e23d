#include "pcad/knn.hpp"

#include <algorithm>
#include <numeric>

namespace pcad {

namespace {
constexpr int kLeafSize = 32;
}

KnnIndex::KnnIndex(const PointCloud& cloud) : cloud_(&cloud) {
  items_.resize(cloud.points.size());
  std::iota(items_.begin(), items_.end(), 0);
  finish_build();
}

KnnIndex::KnnIndex(const PointCloud& cloud, std::vector<int> subset)
    : cloud_(&cloud), items_(std::move(subset)) {
  finish_build();
}

void KnnIndex::finish_build() {
  if (items_.empty()) {
    return;
  }
  nodes_.reserve(2 * items_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<int>(items_.size()));
  // Flat coordinate arrays in kd order keep leaf scans contiguous.
  const size_t n = items_.size();
  xs_.resize(n);
  ys_.resize(n);
  zs_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec3& p = cloud_->points[items_[i]];
    xs_[i] = p.x();
    ys_[i] = p.y();
    zs_[i] = p.z();
  }
}

int KnnIndex::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = cloud_->points[items_[begin]];
  node.hi = node.lo;
  for (int i = begin + 1; i < end; ++i) {
    node.lo = node.lo.cwiseMin(cloud_->points[items_[i]]);
    node.hi = node.hi.cwiseMax(cloud_->points[items_[i]]);
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) {
    return id;
  }

  int axis;
  (node.hi - node.lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(items_.begin() + begin, items_.begin() + mid,
                   items_.begin() + end, [&](int a, int b) {
                     return cloud_->points[a][axis] < cloud_->points[b][axis];
                   });
  const double split = cloud_->points[items_[mid]][axis];

  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = build(begin, mid);
  nodes_[id].right = build(mid, end);
  return id;
}

namespace {

double box_distance_sq(const Vec3& q, const Vec3& lo, const Vec3& hi) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::max({lo[a] - q[a], q[a] - hi[a], 0.0});
    d2 += d * d;
  }
  return d2;
}

}  // namespace

void KnnIndex::search(int node_id, const Vec3& q, int k,
                      std::vector<std::pair<double, int>>& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    // `best` is kept sorted ascending by (distance, index); improving
    // candidates binary-insert into place.
    const double qx = q.x(), qy = q.y(), qz = q.z();
    for (int i = node.begin; i < node.end; ++i) {
      const double dx = xs_[i] - qx;
      const double dy = ys_[i] - qy;
      const double dz = zs_[i] - qz;
      const double d2 = dx * dx + dy * dy + dz * dz;
      const std::pair<double, int> cand{d2, items_[i]};
      if (static_cast<int>(best.size()) == k && !(cand < best.back())) {
        continue;
      }
      best.insert(std::lower_bound(best.begin(), best.end(), cand), cand);
      if (static_cast<int>(best.size()) > k) {
        best.pop_back();
      }
    }
    return;
  }

  const double delta = q[node.axis] - node.split;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, q, k, best);
  // Bounding-box pruning; descend on equality too, since an equidistant
  // point with a lower index may live there.
  if (static_cast<int>(best.size()) < k ||
      box_distance_sq(q, nodes_[far].lo, nodes_[far].hi) <=
          best.back().first) {
    search(far, q, k, best);
  }
}

std::vector<int> KnnIndex::query(const Vec3& q, int k) const {
  std::vector<int> out;
  query(q, k, out);
  return out;
}

void KnnIndex::query(const Vec3& q, int k, std::vector<int>& out) const {
  Scratch scratch;
  query(q, k, scratch, out);
}

void KnnIndex::query(const Vec3& q, int k, Scratch& scratch,
                     std::vector<int>& out) const {
  if (items_.empty()) {
    throw data_error("knn query on an empty index");
  }
  if (k < 1) {
    throw data_error("knn query requires k >= 1");
  }
  auto& best = scratch.heap;
  best.clear();
  best.reserve(static_cast<size_t>(k) + 1);
  search(root_, q, k, best);
  out.resize(best.size());
  for (size_t i = 0; i < best.size(); ++i) {
    out[i] = best[i].second;
  }
}

}  // namespace pcad
