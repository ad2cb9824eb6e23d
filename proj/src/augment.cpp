#include "pcad/augment.hpp"

#include <algorithm>

namespace pcad {

std::vector<int> PatchPartition::members(int patch_id) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(patch_of.size()); ++i) {
    if (patch_of[i] == patch_id) {
      out.push_back(i);
    }
  }
  return out;
}

PatchPartition partition_patches(const PointCloud& cloud, int patch_count,
                                 Rng& rng) {
  const int n = cloud.size();
  if (patch_count < 1 || patch_count > n) {
    throw data_error("patch count must satisfy 1 <= J <= N");
  }

  PatchPartition partition;
  partition.patch_count = patch_count;
  partition.nominal_size = n / patch_count;
  partition.patch_of.assign(n, -1);
  partition.seeds.reserve(patch_count);

  std::vector<int> unassigned(n);
  for (int i = 0; i < n; ++i) {
    unassigned[i] = i;
  }
  std::vector<std::pair<double, int>> candidates;

  for (int b = 0; b < patch_count; ++b) {
    const size_t pos = rng.uniform_index(unassigned.size());
    const int seed = unassigned[pos];
    partition.seeds.push_back(seed);

    if (b == patch_count - 1) {
      for (const int idx : unassigned) {
        partition.patch_of[idx] = b;
      }
      unassigned.clear();
      break;
    }

    candidates.clear();
    const Vec3& sp = cloud.points[seed];
    for (const int idx : unassigned) {
      if (idx != seed) {
        candidates.emplace_back((cloud.points[idx] - sp).squaredNorm(), idx);
      }
    }
    const int take = partition.nominal_size - 1;
    std::nth_element(candidates.begin(), candidates.begin() + take,
                     candidates.end());

    partition.patch_of[seed] = b;
    for (int i = 0; i < take; ++i) {
      partition.patch_of[candidates[i].second] = b;
    }
    std::erase_if(unassigned,
                  [&](int idx) { return partition.patch_of[idx] >= 0; });
  }
  return partition;
}

WeightMatrix patch_weights(const PointCloud& cloud,
                           const PatchPartition& partition, int patch_id) {
  if (patch_id < 0 || patch_id >= partition.patch_count) {
    throw data_error("patch id out of range");
  }
  WeightMatrix wm;
  wm.members = partition.members(patch_id);
  wm.seed = partition.seeds[patch_id];

  const Vec3& center = cloud.points[wm.seed];
  wm.weights.resize(wm.members.size());
  double max_dist = 0.0;
  for (size_t i = 0; i < wm.members.size(); ++i) {
    wm.weights[i] = (cloud.points[wm.members[i]] - center).norm();
    max_dist = std::max(max_dist, wm.weights[i]);
  }
  for (auto& w : wm.weights) {
    w = max_dist > 0.0 ? w / max_dist : 0.0;
  }
  return wm;
}

PseudoAnomalySample displace_patch(const PointCloud& cloud,
                                   const WeightMatrix& wm,
                                   const std::vector<Vec3>& directions,
                                   double alpha, double beta, int patch_id) {
  if (directions.size() != wm.members.size()) {
    throw data_error("direction count does not match patch size");
  }
  PseudoAnomalySample sample;
  sample.cloud = cloud;
  sample.gt_offsets.assign(cloud.points.size(), Vec3::Zero());
  sample.anomaly_mask.assign(cloud.points.size(), false);
  sample.draw = {patch_id, alpha, beta};

  for (size_t i = 0; i < wm.members.size(); ++i) {
    const int idx = wm.members[i];
    const Vec3 displaced =
        cloud.points[idx] + alpha * (1.0 - wm.weights[i]) * beta * directions[i];
    // Exact difference of stored coordinates, not the analytic displacement.
    sample.gt_offsets[idx] = displaced - cloud.points[idx];
    sample.cloud.points[idx] = displaced;
    sample.anomaly_mask[idx] = true;
  }
  return sample;
}

namespace {

PseudoAnomalySample generate_impl(const PointCloud& cloud, int patch_count,
                                  std::array<double, 2> beta_range, Rng& rng,
                                  bool random_direction) {
  if (!random_direction && !cloud.has_normals()) {
    throw data_error(
        "pseudo-anomaly generation needs normals; run estimate_normals first");
  }
  const PatchPartition partition = partition_patches(cloud, patch_count, rng);
  const int patch_id = static_cast<int>(rng.uniform_index(patch_count));
  const double alpha = rng.coin() ? 1.0 : -1.0;
  const double beta = rng.uniform(beta_range[0], beta_range[1]);

  const WeightMatrix wm = patch_weights(cloud, partition, patch_id);
  std::vector<Vec3> directions(wm.members.size());
  if (random_direction) {
    const Vec3 shared = rng.unit_vector();
    std::fill(directions.begin(), directions.end(), shared);
  } else {
    for (size_t i = 0; i < wm.members.size(); ++i) {
      directions[i] = cloud.normals[wm.members[i]];
    }
  }
  return displace_patch(cloud, wm, directions, alpha, beta, patch_id);
}

}  // namespace

PseudoAnomalySample generate_pseudo_anomaly(const PointCloud& cloud,
                                            int patch_count,
                                            std::array<double, 2> beta_range,
                                            Rng& rng) {
  return generate_impl(cloud, patch_count, beta_range, rng, false);
}

PseudoAnomalySample generate_random_direction_anomaly(
    const PointCloud& cloud, int patch_count, std::array<double, 2> beta_range,
    Rng& rng) {
  return generate_impl(cloud, patch_count, beta_range, rng, true);
}

}  // namespace pcad
