#pragma once

#include <cstdint>
#include <vector>

#include "pcad/augment.hpp"
#include "pcad/offset_net.hpp"

namespace pcad {

struct TrainConfig {
  int epochs = 1000;
  int batch_size = 32;
  double lr0 = 0.001;
  int replication = 100;
  std::array<double, 2> beta_range = kDefaultBetaRange;
  int patch_count = kDefaultPatchCount;
  double voxel_size = kDefaultVoxelSize;
  int feature_k = kDefaultFeatureNeighbors;
  int hidden_dim = kDefaultHiddenDim;
  std::uint64_t seed = 0;
  LossVariant variant = LossVariant::full;
};

struct TrainResult {
  OffsetNet net;
  std::vector<LossBreakdown> history;  // per-epoch mean losses
};

// Per epoch, every replicated sample is freshly rotated, normalized, and
// augmented per the configured variant before features and gradients are
// computed. Batches update the net with Adam under the cosine schedule.
// Fully deterministic given cfg.seed.
TrainResult train(const std::vector<PointCloud>& dataset,
                  const TrainConfig& cfg);

// Loss history CSV: epoch,l_dist,l_dir,l_off.
void write_loss_history(const std::string& path,
                        const std::vector<LossBreakdown>& history);

}  // namespace pcad
