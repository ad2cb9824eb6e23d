#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcad/scoring.hpp"
#include "pcad/synth.hpp"
#include "pcad/train.hpp"

namespace pcad {

inline constexpr const char* kVersion = "0.1.0";

// Flat run configuration shared by all subcommands. Defaults follow the
// reference hyperparameters; the desk preset shrinks training to a
// single-core desk run.
struct RunConfig {
  // training
  int epochs = 1000;
  int batch_size = 32;
  double lr0 = 0.001;
  int replication = 100;
  double beta_min = 0.06;
  double beta_max = 0.12;
  int patch_count = 64;
  double voxel_size = 0.03;
  int feature_k = 8;
  int hidden_dim = 64;
  std::string variant = "full";

  // synthetic category
  std::string shape = "sphere";
  std::string category_name = "sphere";
  double radius = 1.0;
  double extent = 1.6;
  double jitter = 0.02;
  int points = 2048;
  int train_count = 4;
  int test_count = 40;
  double anomaly_fraction = 0.5;

  // evaluation
  std::vector<double> noise_sigmas = {0.0, 0.001, 0.003, 0.005};
  std::vector<int> patch_sweep = {16, 32, 64, 128};
  bool point_auc_per_instance = false;
  int normal_estimation_k = 16;

  // run
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

// The desk preset: 150 epochs over 8 replications in batches of 8, sized
// for a minutes-scale single-core run.
void apply_preset(RunConfig& config, const std::string& preset);

std::string serialize_config(const RunConfig& config);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

TrainConfig make_train_config(const RunConfig& config);
SynthCategory make_category(const RunConfig& config);
ScoringOptions make_scoring_options(const RunConfig& config);

// Config snapshot + version, written next to every subcommand's outputs.
void write_run_manifest(const std::string& dir, const std::string& subcommand,
                        const RunConfig& config);

}  // namespace pcad
