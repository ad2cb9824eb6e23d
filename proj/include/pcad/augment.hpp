#pragma once

#include <array>
#include <vector>

#include "pcad/rng.hpp"
#include "pcad/types.hpp"

namespace pcad {

inline constexpr int kDefaultPatchCount = 64;
inline constexpr std::array<double, 2> kDefaultBetaRange = {0.06, 0.12};

// Disjoint cover of all N points by J patches. Patches are formed
// iteratively: a uniform random unassigned seed plus its N_h - 1 nearest
// unassigned points, with N_h = floor(N / J); the last patch absorbs any
// remainder.
struct PatchPartition {
  std::vector<int> patch_of;  // N entries in [0, J)
  std::vector<int> seeds;     // J seed point indices
  int patch_count = 0;
  int nominal_size = 0;  // N_h

  std::vector<int> members(int patch_id) const;
};

// Per-member displacement weights for one patch: w = distance from the
// patch seed, normalized by the maximum seed distance in the patch.
// The seed carries w = 0 and moves the farthest under 1 - w scaling.
struct WeightMatrix {
  std::vector<int> members;     // ascending point indices
  std::vector<double> weights;  // aligned with members, in [0, 1]
  int seed = -1;
};

// One augmented sample: the displaced cloud, exact per-point ground-truth
// offsets, the membership mask of the displaced patch, and the draw that
// produced it.
struct AnomalyDraw {
  int patch_id = -1;
  double alpha = 1.0;  // -1 or +1
  double beta = 0.0;
};

struct PseudoAnomalySample {
  PointCloud cloud;
  std::vector<Vec3> gt_offsets;
  std::vector<bool> anomaly_mask;
  AnomalyDraw draw;
};

PatchPartition partition_patches(const PointCloud& cloud, int patch_count,
                                 Rng& rng);

WeightMatrix patch_weights(const PointCloud& cloud,
                           const PatchPartition& partition, int patch_id);

// Deterministic core of the augmentation: displaces the given patch by
// alpha * direction * (1 - w) * beta. `directions` is aligned with
// wm.members. gt offsets are the exact difference of displaced and
// original coordinates.
PseudoAnomalySample displace_patch(const PointCloud& cloud,
                                   const WeightMatrix& wm,
                                   const std::vector<Vec3>& directions,
                                   double alpha, double beta, int patch_id);

// Draws one patch uniformly, a sign alpha from {-1, +1}, and a center
// displacement beta from beta_range; patch points move along their own
// normals. Expects a normalized cloud with unit normals.
PseudoAnomalySample generate_pseudo_anomaly(const PointCloud& cloud,
                                            int patch_count,
                                            std::array<double, 2> beta_range,
                                            Rng& rng);

// Ablation variant: the whole patch shares one uniform random unit
// direction instead of per-point normals.
PseudoAnomalySample generate_random_direction_anomaly(
    const PointCloud& cloud, int patch_count, std::array<double, 2> beta_range,
    Rng& rng);

}  // namespace pcad
