#pragma once

#include <Eigen/Dense>

#include "pcad/types.hpp"
#include "pcad/voxel.hpp"

namespace pcad {

inline constexpr int kFeatureDim = 32;
inline constexpr int kDefaultFeatureNeighbors = 8;

// N x kFeatureDim row-per-point features.
using FeatureMatrix = Eigen::MatrixXd;

// Fixed geometric descriptor per point, computed from the cloud alone.
// Columns:
//   0..2   offset to the centroid of the point's voxel
//   3..5   point normal
//   6..8   linearity / planarity / sphericity of the k-neighborhood
//   9..10  mean and std of the k nearest neighbor distances
//   11     points in the own voxel, divided by k
//   12..14 eigen descriptors at scale 2k
//   15..17 eigen descriptors at scale 4k
//   18..19 mean and std of neighbor height along the point normal
//   20..31 zero padding up to kFeatureDim
// Neighbor scales exclude the point itself and clamp to N - 1.
FeatureMatrix extract_features(const PointCloud& cloud, const VoxelGrid& grid,
                               int k);

}  // namespace pcad
