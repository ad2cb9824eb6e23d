#include "pcad/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pcad/io.hpp"

namespace pcad {

namespace {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return json{{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"lr0", c.lr0},
              {"replication", c.replication},
              {"beta_min", c.beta_min},
              {"beta_max", c.beta_max},
              {"patch_count", c.patch_count},
              {"voxel_size", c.voxel_size},
              {"feature_k", c.feature_k},
              {"hidden_dim", c.hidden_dim},
              {"variant", c.variant},
              {"shape", c.shape},
              {"category_name", c.category_name},
              {"radius", c.radius},
              {"extent", c.extent},
              {"jitter", c.jitter},
              {"points", c.points},
              {"train_count", c.train_count},
              {"test_count", c.test_count},
              {"anomaly_fraction", c.anomaly_fraction},
              {"noise_sigmas", c.noise_sigmas},
              {"patch_sweep", c.patch_sweep},
              {"point_auc_per_instance", c.point_auc_per_instance},
              {"normal_estimation_k", c.normal_estimation_k},
              {"seed", c.seed},
              {"output_dir", c.output_dir}};
}

void from_json(const json& j, RunConfig& c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      j.at(key).get_to(field);
    }
  };
  get("epochs", c.epochs);
  get("batch_size", c.batch_size);
  get("lr0", c.lr0);
  get("replication", c.replication);
  get("beta_min", c.beta_min);
  get("beta_max", c.beta_max);
  get("patch_count", c.patch_count);
  get("voxel_size", c.voxel_size);
  get("feature_k", c.feature_k);
  get("hidden_dim", c.hidden_dim);
  get("variant", c.variant);
  get("shape", c.shape);
  get("category_name", c.category_name);
  get("radius", c.radius);
  get("extent", c.extent);
  get("jitter", c.jitter);
  get("points", c.points);
  get("train_count", c.train_count);
  get("test_count", c.test_count);
  get("anomaly_fraction", c.anomaly_fraction);
  get("noise_sigmas", c.noise_sigmas);
  get("patch_sweep", c.patch_sweep);
  get("point_auc_per_instance", c.point_auc_per_instance);
  get("normal_estimation_k", c.normal_estimation_k);
  get("seed", c.seed);
  get("output_dir", c.output_dir);
}

}  // namespace

void apply_preset(RunConfig& config, const std::string& preset) {
  if (preset.empty() || preset == "paper") {
    return;
  }
  if (preset == "desk") {
    config.epochs = 150;
    config.replication = 8;
    config.batch_size = 8;
    return;
  }
  throw data_error("unknown preset '" + preset + "' (expected desk or paper)");
}

std::string serialize_config(const RunConfig& config) {
  return to_json(config).dump(2) + "\n";
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("config: ") + e.what());
  }
  RunConfig config;
  try {
    from_json(j, config);
  } catch (const json::exception& e) {
    throw parse_error(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open config '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

TrainConfig make_train_config(const RunConfig& c) {
  TrainConfig cfg;
  cfg.epochs = c.epochs;
  cfg.batch_size = c.batch_size;
  cfg.lr0 = c.lr0;
  cfg.replication = c.replication;
  cfg.beta_range = {c.beta_min, c.beta_max};
  cfg.patch_count = c.patch_count;
  cfg.voxel_size = c.voxel_size;
  cfg.feature_k = c.feature_k;
  cfg.hidden_dim = c.hidden_dim;
  cfg.seed = c.seed;
  cfg.variant = parse_variant(c.variant);
  return cfg;
}

SynthCategory make_category(const RunConfig& c) {
  SynthCategory cat;
  cat.kind = parse_shape_kind(c.shape);
  cat.radius = c.radius;
  cat.extent = c.extent;
  cat.jitter = c.jitter;
  cat.points = c.points;
  cat.train_count = c.train_count;
  cat.test_count = c.test_count;
  cat.anomaly_fraction = c.anomaly_fraction;
  cat.seed = c.seed;
  cat.name = c.category_name;
  return cat;
}

ScoringOptions make_scoring_options(const RunConfig& c) {
  ScoringOptions opts;
  opts.voxel_size = c.voxel_size;
  opts.feature_k = c.feature_k;
  opts.normal_estimation_k = c.normal_estimation_k;
  opts.point_auc_per_instance = c.point_auc_per_instance;
  return opts;
}

void write_run_manifest(const std::string& dir, const std::string& subcommand,
                        const RunConfig& config) {
  nlohmann::json manifest;
  manifest["tool"] = "pcad";
  manifest["version"] = kVersion;
  manifest["subcommand"] = subcommand;
  manifest["config"] = to_json(config);
  write_file_atomic(
      (std::filesystem::path(dir) / "run_manifest.json").string(),
      manifest.dump(2) + "\n");
}

}  // namespace pcad
