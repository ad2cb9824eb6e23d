#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcad/metrics.hpp"
#include "pcad/offset_net.hpp"
#include "pcad/train.hpp"

namespace pcad {

inline const std::vector<double> kDefaultNoiseSigmas = {0.0, 0.001, 0.003,
                                                        0.005};
inline const std::vector<int> kDefaultPatchSweep = {16, 32, 64, 128};

struct ScoredCloud {
  std::vector<double> point_scores;
  double object = 0.0;  // mean of point_scores
};

// Test instance with its object label and, for anomalous instances, the
// per-point ground truth.
struct LabeledInstance {
  PointCloud cloud;
  int object_label = 0;
  std::vector<bool> point_labels;  // empty for normal instances
};

struct ScoringOptions {
  double voxel_size = kDefaultVoxelSize;
  int feature_k = kDefaultFeatureNeighbors;
  int normal_estimation_k = 16;  // fallback when a cloud lacks normals
  bool point_auc_per_instance = false;
};

// normalize -> features -> forward -> per-point |dx|+|dy|+|dz| scores.
// Clouds without normals get estimated ones first.
ScoredCloud score_instance(const OffsetNet& net, const PointCloud& cloud,
                           const ScoringOptions& opts = {});

struct RobustnessRow {
  double sigma = 0.0;
  double object_auc_roc = 0.0;
  double point_auc_roc = 0.0;
};

struct EvalReport {
  double object_auc_roc = 0.0;
  double point_auc_roc = 0.0;
  double object_auc_pr = 0.0;
  double mean_rank_value = 1.0;
  std::vector<RobustnessRow> robustness;
};

// Scores every instance and computes object/point AUC-ROC and object
// AUC-PR. Point-level labels pool across all instances by default; the
// per-instance alternative averages AUCs of instances holding both
// classes.
EvalReport evaluate(const OffsetNet& net,
                    const std::vector<LabeledInstance>& instances,
                    const ScoringOptions& opts = {});

// Perturbs each instance with Gaussian noise per sigma and re-evaluates.
// The sigma = 0 row equals the clean evaluation exactly.
std::vector<RobustnessRow> robustness_sweep(
    const OffsetNet& net, const std::vector<LabeledInstance>& instances,
    const std::vector<double>& sigmas, std::uint64_t seed,
    const ScoringOptions& opts = {});

struct PatchSweepRow {
  int patch_count = 0;
  double object_auc_roc = 0.0;
  double point_auc_roc = 0.0;
};

// Trains one model per patch count with a shared seed and evaluates each
// on the shared test set.
std::vector<PatchSweepRow> patch_sweep(
    const std::vector<PointCloud>& train_clouds,
    const std::vector<LabeledInstance>& instances,
    const std::vector<int>& patch_counts, const TrainConfig& base_cfg,
    const ScoringOptions& opts = {});

}  // namespace pcad
