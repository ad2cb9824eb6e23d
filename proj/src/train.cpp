#include "pcad/train.hpp"

#include <sstream>

#include "pcad/io.hpp"
#include "pcad/transforms.hpp"
#include "pcad/voxel.hpp"

namespace pcad {

namespace {

void check_config(const TrainConfig& cfg) {
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.replication < 1 ||
      cfg.patch_count < 1 || cfg.feature_k < 4 || cfg.hidden_dim < 1 ||
      !(cfg.lr0 > 0.0) || !(cfg.voxel_size > 0.0) ||
      !(cfg.beta_range[0] <= cfg.beta_range[1])) {
    throw data_error("invalid training configuration");
  }
}

void accumulate(NetGradients& total, const NetGradients& grads) {
  total.w1 += grads.w1;
  total.w2 += grads.w2;
  total.w3 += grads.w3;
  total.b1 += grads.b1;
  total.b2 += grads.b2;
  total.b3 += grads.b3;
  total.a1 += grads.a1;
  total.a2 += grads.a2;
}

void scale(NetGradients& g, double s) {
  g.w1 *= s;
  g.w2 *= s;
  g.w3 *= s;
  g.b1 *= s;
  g.b2 *= s;
  g.b3 *= s;
  g.a1 *= s;
  g.a2 *= s;
}

}  // namespace

TrainResult train(const std::vector<PointCloud>& dataset,
                  const TrainConfig& cfg) {
  check_config(cfg);
  if (dataset.empty()) {
    throw data_error("training set is empty");
  }
  for (const auto& cloud : dataset) {
    if (!cloud.has_normals()) {
      throw data_error("every training cloud needs normals");
    }
  }

  Rng init_rng(split_seed(cfg.seed, "init"));
  TrainResult result;
  result.net = OffsetNet::init(kFeatureDim, cfg.hidden_dim, init_rng);
  AdamState state = AdamState::zeros_like(result.net);

  const int samples_per_epoch =
      static_cast<int>(dataset.size()) * cfg.replication;
  const long steps_per_epoch =
      (samples_per_epoch + cfg.batch_size - 1) / cfg.batch_size;
  const long total_steps = steps_per_epoch * cfg.epochs;

  long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    LossBreakdown epoch_loss;
    int batch_count = 0;
    NetGradients batch_grads = OffsetNet::zeros_like(result.net);

    for (int s = 0; s < samples_per_epoch; ++s) {
      // One stream per (epoch, sample) keeps draws independent of batch
      // layout.
      Rng rng(split_seed(cfg.seed, "sample",
                         static_cast<std::uint64_t>(epoch) * samples_per_epoch +
                             static_cast<std::uint64_t>(s)));
      const PointCloud& base = dataset[s % dataset.size()];
      const PointCloud prepared = normalize(random_rotation(base, rng));

      const PseudoAnomalySample sample =
          cfg.variant == LossVariant::random_direction
              ? generate_random_direction_anomaly(prepared, cfg.patch_count,
                                                  cfg.beta_range, rng)
              : generate_pseudo_anomaly(prepared, cfg.patch_count,
                                        cfg.beta_range, rng);

      const VoxelGrid grid = voxelize(sample.cloud, cfg.voxel_size);
      const FeatureMatrix features =
          extract_features(sample.cloud, grid, cfg.feature_k);
      const Eigen::MatrixXd gt = offsets_to_matrix(sample.gt_offsets);

      auto lg = loss_and_grad(result.net, features, gt, cfg.variant);
      epoch_loss.dist += lg.loss.dist;
      epoch_loss.dir += lg.loss.dir;
      epoch_loss.total += lg.loss.total;

      accumulate(batch_grads, lg.grads);
      ++batch_count;

      if (batch_count == cfg.batch_size || s == samples_per_epoch - 1) {
        scale(batch_grads, 1.0 / batch_count);
        adam_step(result.net, batch_grads, state,
                  cosine_lr(step, total_steps, cfg.lr0));
        ++step;
        batch_count = 0;
        batch_grads = OffsetNet::zeros_like(result.net);
      }
    }

    epoch_loss.dist /= samples_per_epoch;
    epoch_loss.dir /= samples_per_epoch;
    epoch_loss.total /= samples_per_epoch;
    result.history.push_back(epoch_loss);
  }
  return result;
}

void write_loss_history(const std::string& path,
                        const std::vector<LossBreakdown>& history) {
  std::ostringstream out;
  out << "epoch,l_dist,l_dir,l_off\n";
  for (size_t e = 0; e < history.size(); ++e) {
    out << e << ',' << format_double(history[e].dist) << ','
        << format_double(history[e].dir) << ','
        << format_double(history[e].total) << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace pcad
