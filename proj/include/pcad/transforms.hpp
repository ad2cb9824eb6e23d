#pragma once

#include <vector>

#include "pcad/rng.hpp"
#include "pcad/types.hpp"

namespace pcad {

// Centers the cloud on its centroid and divides by the maximum absolute
// post-centering coordinate, so coordinates span [-1, 1] with aspect ratio
// preserved. Normals pass through untouched.
PointCloud normalize(const PointCloud& cloud);

Eigen::Matrix3d random_rotation_matrix(Rng& rng);

// Applies one rotation matrix to points and normals alike.
PointCloud rotate(const PointCloud& cloud, const Eigen::Matrix3d& rotation);

// Rotation drawn uniformly over SO(3).
PointCloud random_rotation(const PointCloud& cloud, Rng& rng);

// PCA normals from each point's k-nearest neighborhood (the point itself
// included), oriented away from the cloud centroid. Neighborhoods whose
// covariance has rank < 2 fall back to the radial direction and are
// flagged when `degenerate` is given.
PointCloud estimate_normals(const PointCloud& cloud, int k,
                            std::vector<bool>* degenerate = nullptr);

// Independent zero-mean Gaussian perturbation of every coordinate.
// sigma = 0 returns the input unchanged.
PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, Rng& rng);

}  // namespace pcad
