#include "pcad/transforms.hpp"

#include <cmath>

#include "pcad/knn.hpp"

namespace pcad {

PointCloud normalize(const PointCloud& cloud) {
  validate(cloud);
  const Vec3 center = centroid(cloud);
  double scale = 0.0;
  for (const auto& p : cloud.points) {
    scale = std::max(scale, (p - center).cwiseAbs().maxCoeff());
  }
  if (scale <= 0.0) {
    throw data_error("cannot normalize: all points coincide");
  }
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p = (p - center) / scale;
  }
  return out;
}

Eigen::Matrix3d random_rotation_matrix(Rng& rng) {
  // Shoemake's subgroup algorithm: uniform unit quaternion from three
  // uniform draws.
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(2.0 * M_PI * u3),
                             a * std::sin(2.0 * M_PI * u2),
                             a * std::cos(2.0 * M_PI * u2),
                             b * std::sin(2.0 * M_PI * u3));
  return q.toRotationMatrix();
}

PointCloud rotate(const PointCloud& cloud, const Eigen::Matrix3d& rotation) {
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p = rotation * p;
  }
  for (auto& n : out.normals) {
    n = rotation * n;
  }
  return out;
}

PointCloud random_rotation(const PointCloud& cloud, Rng& rng) {
  return rotate(cloud, random_rotation_matrix(rng));
}

PointCloud estimate_normals(const PointCloud& cloud, int k,
                            std::vector<bool>* degenerate) {
  validate(cloud);
  const int n = cloud.size();
  if (k < 3 || k > n) {
    throw data_error("estimate_normals requires 3 <= k <= N");
  }
  const Vec3 center = centroid(cloud);
  const KnnIndex index(cloud);

  PointCloud out = cloud;
  out.normals.assign(n, Vec3::UnitZ());
  if (degenerate) {
    degenerate->assign(n, false);
  }

  std::vector<int> nbrs;
  for (int i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[i];
    index.query(p, k, nbrs);

    Vec3 mean = Vec3::Zero();
    for (const int j : nbrs) {
      mean += cloud.points[j];
    }
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const int j : nbrs) {
      const Vec3 d = cloud.points[j] - mean;
      cov += d * d.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Vec3 evals = eig.eigenvalues();  // ascending
    const bool rank_deficient = evals[1] <= 1e-12 * std::max(evals[2], 1e-300);

    Vec3 normal;
    if (rank_deficient) {
      if (degenerate) {
        (*degenerate)[i] = true;
      }
      const Vec3 radial = p - center;
      normal = radial.norm() > 0.0 ? Vec3(radial.normalized()) : Vec3::UnitZ();
    } else {
      normal = eig.eigenvectors().col(0);
      if (normal.dot(p - center) < 0.0) {
        normal = -normal;
      }
    }
    out.normals[i] = normal;
  }
  return out;
}

PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, Rng& rng) {
  if (sigma < 0.0) {
    throw data_error("noise sigma must be nonnegative");
  }
  if (sigma == 0.0) {
    return cloud;
  }
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p.x() += sigma * rng.normal();
    p.y() += sigma * rng.normal();
    p.z() += sigma * rng.normal();
  }
  return out;
}

}  // namespace pcad
