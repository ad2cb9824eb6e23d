#include "pcad/scoring.hpp"

#include "pcad/transforms.hpp"
#include "pcad/voxel.hpp"

namespace pcad {

ScoredCloud score_instance(const OffsetNet& net, const PointCloud& cloud,
                           const ScoringOptions& opts) {
  PointCloud prepared = normalize(cloud);
  if (!prepared.has_normals()) {
    prepared = estimate_normals(prepared, opts.normal_estimation_k);
  }
  const VoxelGrid grid = voxelize(prepared, opts.voxel_size);
  const FeatureMatrix features =
      extract_features(prepared, grid, opts.feature_k);
  const Eigen::MatrixXd pred = forward(net, features);

  ScoredCloud scored;
  scored.point_scores.resize(pred.rows());
  for (long i = 0; i < pred.rows(); ++i) {
    scored.point_scores[i] = point_score(Vec3(pred.row(i)));
  }
  scored.object = object_score(scored.point_scores);
  return scored;
}

namespace {

struct PooledEval {
  double object_auc_roc = 0.0;
  double point_auc_roc = 0.0;
  double object_auc_pr = 0.0;
};

PooledEval evaluate_scored(const std::vector<LabeledInstance>& instances,
                           const std::vector<ScoredCloud>& scored,
                           bool per_instance_point_auc) {
  std::vector<double> object_scores;
  std::vector<int> object_labels;
  std::vector<double> pooled_scores;
  std::vector<int> pooled_labels;
  std::vector<double> instance_aucs;

  for (size_t q = 0; q < instances.size(); ++q) {
    const auto& inst = instances[q];
    const auto& s = scored[q];
    object_scores.push_back(s.object);
    object_labels.push_back(inst.object_label);

    std::vector<int> labels(s.point_scores.size(), 0);
    if (!inst.point_labels.empty()) {
      if (inst.point_labels.size() != s.point_scores.size()) {
        throw data_error("point labels do not match cloud size");
      }
      for (size_t i = 0; i < labels.size(); ++i) {
        labels[i] = inst.point_labels[i] ? 1 : 0;
      }
    }
    pooled_scores.insert(pooled_scores.end(), s.point_scores.begin(),
                         s.point_scores.end());
    pooled_labels.insert(pooled_labels.end(), labels.begin(), labels.end());

    if (per_instance_point_auc) {
      const bool has_pos =
          std::find(labels.begin(), labels.end(), 1) != labels.end();
      const bool has_neg =
          std::find(labels.begin(), labels.end(), 0) != labels.end();
      if (has_pos && has_neg) {
        instance_aucs.push_back(auc_roc(s.point_scores, labels));
      }
    }
  }

  PooledEval out;
  out.object_auc_roc = auc_roc(object_scores, object_labels);
  out.object_auc_pr = auc_pr(object_scores, object_labels);
  if (per_instance_point_auc) {
    if (instance_aucs.empty()) {
      throw data_error("no instance carries both point classes");
    }
    out.point_auc_roc = object_score(instance_aucs);
  } else {
    out.point_auc_roc = auc_roc(pooled_scores, pooled_labels);
  }
  return out;
}

std::vector<ScoredCloud> score_all(const OffsetNet& net,
                                   const std::vector<LabeledInstance>& instances,
                                   const ScoringOptions& opts) {
  std::vector<ScoredCloud> scored;
  scored.reserve(instances.size());
  for (const auto& inst : instances) {
    scored.push_back(score_instance(net, inst.cloud, opts));
  }
  return scored;
}

}  // namespace

EvalReport evaluate(const OffsetNet& net,
                    const std::vector<LabeledInstance>& instances,
                    const ScoringOptions& opts) {
  if (instances.empty()) {
    throw data_error("evaluation needs at least one instance");
  }
  const auto pooled = evaluate_scored(instances, score_all(net, instances, opts),
                                      opts.point_auc_per_instance);
  EvalReport report;
  report.object_auc_roc = pooled.object_auc_roc;
  report.point_auc_roc = pooled.point_auc_roc;
  report.object_auc_pr = pooled.object_auc_pr;
  report.mean_rank_value = 1.0;  // single method under evaluation
  return report;
}

std::vector<RobustnessRow> robustness_sweep(
    const OffsetNet& net, const std::vector<LabeledInstance>& instances,
    const std::vector<double>& sigmas, std::uint64_t seed,
    const ScoringOptions& opts) {
  std::vector<RobustnessRow> rows;
  for (size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    if (sigma < 0.0) {
      throw data_error("noise sigma must be nonnegative");
    }
    std::vector<LabeledInstance> noisy = instances;
    for (size_t q = 0; q < noisy.size(); ++q) {
      Rng rng(split_seed(seed, "noise", si * instances.size() + q));
      noisy[q].cloud = add_gaussian_noise(noisy[q].cloud, sigma, rng);
    }
    const auto pooled = evaluate_scored(noisy, score_all(net, noisy, opts),
                                        opts.point_auc_per_instance);
    rows.push_back({sigma, pooled.object_auc_roc, pooled.point_auc_roc});
  }
  return rows;
}

std::vector<PatchSweepRow> patch_sweep(
    const std::vector<PointCloud>& train_clouds,
    const std::vector<LabeledInstance>& instances,
    const std::vector<int>& patch_counts, const TrainConfig& base_cfg,
    const ScoringOptions& opts) {
  std::vector<PatchSweepRow> rows;
  for (const int j : patch_counts) {
    TrainConfig cfg = base_cfg;
    cfg.patch_count = j;
    const TrainResult trained = train(train_clouds, cfg);
    const EvalReport report = evaluate(trained.net, instances, opts);
    rows.push_back({j, report.object_auc_roc, report.point_auc_roc});
  }
  return rows;
}

}  // namespace pcad
