#include "pcad/features.hpp"

#include <cmath>

#include "pcad/knn.hpp"

namespace pcad {

namespace {

// linearity, planarity, sphericity from eigenvalues sorted ascending.
Eigen::Vector3d eigen_descriptors(const Eigen::Matrix3d& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
  eig.computeDirect(cov, Eigen::EigenvaluesOnly);
  const Vec3 ev = eig.eigenvalues().cwiseMax(0.0);
  if (ev[2] <= 0.0) {
    return Eigen::Vector3d::Zero();
  }
  return {(ev[2] - ev[1]) / ev[2], (ev[1] - ev[0]) / ev[2], ev[0] / ev[2]};
}

}  // namespace

FeatureMatrix extract_features(const PointCloud& cloud, const VoxelGrid& grid,
                               int k) {
  validate(cloud);
  const int n = cloud.size();
  if (!cloud.has_normals()) {
    throw data_error("feature extraction needs normals");
  }
  if (k < 4) {
    throw data_error("feature extraction requires k >= 4");
  }
  if (k > n) {
    throw data_error("feature neighborhood exceeds cloud size");
  }
  if (static_cast<int>(grid.point_to_voxel.size()) != n) {
    throw data_error("voxel grid does not match the cloud");
  }

  // Centroid of each voxel's member points.
  std::vector<Vec3> voxel_centroid(grid.voxel_count(), Vec3::Zero());
  for (int v = 0; v < grid.voxel_count(); ++v) {
    for (const int idx : grid.voxel_to_points[v]) {
      voxel_centroid[v] += cloud.points[idx];
    }
    voxel_centroid[v] /= static_cast<double>(grid.voxel_to_points[v].size());
  }

  const KnnIndex index(cloud);
  const int max_scale = std::min(4 * k, n - 1);

  FeatureMatrix features = FeatureMatrix::Zero(n, kFeatureDim);
  std::vector<int> nbrs;
  KnnIndex::Scratch scratch;
  for (int i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[i];
    const Vec3& normal = cloud.normals[i];
    const int voxel = grid.point_to_voxel[i];

    features.block<1, 3>(i, 0) = (p - voxel_centroid[voxel]).transpose();
    features.block<1, 3>(i, 3) = normal.transpose();
    features(i, 11) =
        static_cast<double>(grid.voxel_to_points[voxel].size()) / k;

    index.query(p, max_scale + 1, scratch, nbrs);

    // Walk neighbors in distance order, skipping the point itself, and
    // checkpoint the covariance at scales k, 2k, 4k. Sums are centered on
    // p for conditioning.
    Vec3 sum = Vec3::Zero();
    Eigen::Matrix3d sq = Eigen::Matrix3d::Zero();
    double dist_sum = 0.0, dist_sq = 0.0;
    double height_sum = 0.0, height_sq = 0.0;
    int count = 0;
    int scale_slot = 0;
    const int scales[3] = {std::min(k, max_scale), std::min(2 * k, max_scale),
                           max_scale};
    const int scale_cols[3] = {6, 12, 15};

    for (const int j : nbrs) {
      if (j == i) {
        continue;
      }
      const Vec3 d = cloud.points[j] - p;
      sum += d;
      sq += d * d.transpose();
      ++count;
      if (count <= scales[0]) {
        const double dist = d.norm();
        dist_sum += dist;
        dist_sq += dist * dist;
        const double height = d.dot(normal);
        height_sum += height;
        height_sq += height * height;
      }
      while (scale_slot < 3 && count == scales[scale_slot]) {
        // Covariance over the point plus its `count` nearest neighbors.
        const double m = count + 1;
        const Vec3 mean = sum / m;
        const Eigen::Matrix3d cov = sq / m - mean * mean.transpose();
        features.block<1, 3>(i, scale_cols[scale_slot]) =
            eigen_descriptors(cov).transpose();
        ++scale_slot;
      }
    }

    const double kd = scales[0];
    const double dist_mean = dist_sum / kd;
    const double height_mean = height_sum / kd;
    features(i, 9) = dist_mean;
    features(i, 10) = std::sqrt(std::max(0.0, dist_sq / kd - dist_mean * dist_mean));
    features(i, 18) = height_mean;
    features(i, 19) =
        std::sqrt(std::max(0.0, height_sq / kd - height_mean * height_mean));
  }

  if (!features.allFinite()) {
    throw numeric_error("non-finite feature value");
  }
  return features;
}

}  // namespace pcad
