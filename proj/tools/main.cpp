#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pcad/config.hpp"
#include "pcad/io.hpp"
#include "pcad/scoring.hpp"
#include "pcad/synth.hpp"
#include "pcad/train.hpp"
#include "pcad/transforms.hpp"

namespace fs = std::filesystem;
using namespace pcad;

namespace {

// Option values land in a staging config; only flags the user actually
// passed are copied onto the final config, so precedence is
// defaults < config file < preset < PCAD_OUTPUT_DIR < explicit flags.
struct OptionSet {
  RunConfig staging;
  std::string config_path;
  std::string preset;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>>
      copiers;

  template <class T>
  void bind(CLI::App& app, const std::string& flag, T RunConfig::*member,
            const std::string& desc) {
    auto* opt = app.add_option(flag, staging.*member, desc);
    copiers.emplace_back(opt, [member](RunConfig& dst, const RunConfig& src) {
      dst.*member = src.*member;
    });
  }

  void add_common(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--preset", preset, "preset: desk or paper");
    bind(app, "--seed", &RunConfig::seed, "master seed");
    bind(app, "--out", &RunConfig::output_dir, "output directory");
    bind(app, "--epochs", &RunConfig::epochs, "training epochs");
    bind(app, "--batch-size", &RunConfig::batch_size, "batch size");
    bind(app, "--lr", &RunConfig::lr0, "initial learning rate");
    bind(app, "--replication", &RunConfig::replication,
         "training set replication factor");
    bind(app, "--beta-min", &RunConfig::beta_min, "min center displacement");
    bind(app, "--beta-max", &RunConfig::beta_max, "max center displacement");
    bind(app, "--patches", &RunConfig::patch_count, "patch count J");
    bind(app, "--voxel-size", &RunConfig::voxel_size, "voxel edge length");
    bind(app, "--feature-k", &RunConfig::feature_k, "feature neighborhood size");
    bind(app, "--hidden-dim", &RunConfig::hidden_dim, "MLP hidden width");
    bind(app, "--variant", &RunConfig::variant,
         "loss variant: full|dist_only|dir_only|random_direction");
    bind(app, "--shape", &RunConfig::shape,
         "category shape: sphere|cylinder|torus|capsule");
    bind(app, "--category-name", &RunConfig::category_name, "category tag");
    bind(app, "--radius", &RunConfig::radius, "shape radius");
    bind(app, "--extent", &RunConfig::extent, "shape height / ring radius");
    bind(app, "--jitter", &RunConfig::jitter, "per-instance parameter jitter");
    bind(app, "--points", &RunConfig::points, "points per cloud");
    bind(app, "--train-count", &RunConfig::train_count, "training clouds");
    bind(app, "--test-count", &RunConfig::test_count, "test instances");
    bind(app, "--anomaly-fraction", &RunConfig::anomaly_fraction,
         "fraction of anomalous test instances");
    bind(app, "--noise-sigmas", &RunConfig::noise_sigmas,
         "noise sweep standard deviations");
    bind(app, "--patch-sweep", &RunConfig::patch_sweep, "patch sweep J values");
    bind(app, "--point-auc-per-instance", &RunConfig::point_auc_per_instance,
         "average per-instance point AUC instead of pooling");
    bind(app, "--normal-k", &RunConfig::normal_estimation_k,
         "neighborhood for normal estimation fallback");
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) {
      config = load_config(config_path);
    }
    if (!preset.empty()) {
      apply_preset(config, preset);
    }
    if (const char* env = std::getenv("PCAD_OUTPUT_DIR"); env && *env) {
      config.output_dir = env;
    }
    for (const auto& [opt, copy] : copiers) {
      if (opt->count() > 0) {
        copy(config, staging);
      }
    }
    return config;
  }
};

PointCloud load_with_normals(const std::string& path, const RunConfig& config) {
  PointCloud cloud = read_cloud(path);
  if (!cloud.has_normals()) {
    cloud = estimate_normals(cloud, config.normal_estimation_k);
  }
  return cloud;
}

std::vector<PointCloud> training_clouds(const Benchmark& bench,
                                        const RunConfig& config) {
  std::vector<PointCloud> clouds = bench.train;
  for (auto& cloud : clouds) {
    if (!cloud.has_normals()) {
      cloud = estimate_normals(cloud, config.normal_estimation_k);
    }
  }
  return clouds;
}

void run_bench(const RunConfig& config) {
  const SynthCategory category = make_category(config);
  const Benchmark bench = build_benchmark(category);
  write_benchmark(config.output_dir, bench, category);
  write_run_manifest(config.output_dir, "bench", config);
  std::cout << "benchmark '" << category.name << "': " << bench.train.size()
            << " train, " << bench.test.size() << " test -> "
            << config.output_dir << "\n";
}

void run_augment(const RunConfig& config, const std::string& input,
                 bool random_direction) {
  PointCloud cloud = normalize(load_with_normals(input, config));
  Rng rng(split_seed(config.seed, "augment"));
  const std::array<double, 2> beta{config.beta_min, config.beta_max};
  const PseudoAnomalySample sample =
      random_direction
          ? generate_random_direction_anomaly(cloud, config.patch_count, beta, rng)
          : generate_pseudo_anomaly(cloud, config.patch_count, beta, rng);

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  write_ply((out / "augmented.ply").string(), sample.cloud);
  write_offset_csv((out / "offsets.csv").string(), sample.gt_offsets);
  write_mask_csv((out / "mask.csv").string(), sample.anomaly_mask);
  write_run_manifest(config.output_dir, "augment", config);
  std::cout << "augmented patch " << sample.draw.patch_id
            << " alpha " << sample.draw.alpha << " beta " << sample.draw.beta
            << " -> " << config.output_dir << "\n";
}

void run_train(const RunConfig& config, const std::string& bench_dir) {
  const Benchmark bench = read_benchmark(bench_dir);
  const TrainResult result =
      train(training_clouds(bench, config), make_train_config(config));

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  save_checkpoint((out / "model.txt").string(), result.net);
  write_loss_history((out / "loss_history.csv").string(), result.history);
  write_run_manifest(config.output_dir, "train", config);
  if (!result.history.empty()) {
    std::cout << "trained " << result.history.size() << " epochs, final l_off "
              << result.history.back().total << "\n";
  }
  std::cout << "model -> " << (out / "model.txt").string() << "\n";
}

void run_score(const RunConfig& config, const std::string& model,
               const std::string& input) {
  const OffsetNet net = load_checkpoint(model);
  PointCloud cloud = normalize(load_with_normals(input, config));
  const ScoredCloud scored = score_instance(net, cloud, make_scoring_options(config));

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  write_ply((out / "heatmap.ply").string(), cloud, &scored.point_scores);
  write_score_csv((out / "scores.csv").string(), cloud, scored.point_scores);
  write_run_manifest(config.output_dir, "score", config);
  std::cout << "object score " << scored.object << " -> " << config.output_dir
            << "\n";
}

void write_report(const std::string& dir, const EvalReport& report) {
  std::ostringstream csv;
  csv << "metric,value\n";
  csv << "object_auc_roc," << format_double(report.object_auc_roc) << '\n';
  csv << "point_auc_roc," << format_double(report.point_auc_roc) << '\n';
  csv << "object_auc_pr," << format_double(report.object_auc_pr) << '\n';
  csv << "mean_rank," << format_double(report.mean_rank_value) << '\n';
  for (const auto& row : report.robustness) {
    csv << "object_auc_roc@sigma=" << format_double(row.sigma) << ','
        << format_double(row.object_auc_roc) << '\n';
    csv << "point_auc_roc@sigma=" << format_double(row.sigma) << ','
        << format_double(row.point_auc_roc) << '\n';
  }
  write_file_atomic((fs::path(dir) / "report.csv").string(), csv.str());

  std::ostringstream text;
  text << "object-level AUC-ROC: " << report.object_auc_roc << '\n'
       << "point-level AUC-ROC:  " << report.point_auc_roc << '\n'
       << "object-level AUC-PR:  " << report.object_auc_pr << '\n';
  for (const auto& row : report.robustness) {
    text << "sigma " << row.sigma << ": object " << row.object_auc_roc
         << ", point " << row.point_auc_roc << '\n';
  }
  write_file_atomic((fs::path(dir) / "summary.txt").string(), text.str());
}

void run_eval(const RunConfig& config, const std::string& model,
              const std::string& bench_dir) {
  const OffsetNet net = load_checkpoint(model);
  const Benchmark bench = read_benchmark(bench_dir);
  const EvalReport report =
      evaluate(net, bench.test, make_scoring_options(config));

  fs::create_directories(config.output_dir);
  write_report(config.output_dir, report);
  write_run_manifest(config.output_dir, "eval", config);
  std::cout << "object AUC-ROC " << report.object_auc_roc << ", point AUC-ROC "
            << report.point_auc_roc << ", object AUC-PR "
            << report.object_auc_pr << "\n";
}

void run_sweep_noise(const RunConfig& config, const std::string& model,
                     const std::string& bench_dir) {
  const OffsetNet net = load_checkpoint(model);
  const Benchmark bench = read_benchmark(bench_dir);
  const auto rows =
      robustness_sweep(net, bench.test, config.noise_sigmas,
                       split_seed(config.seed, "sweep-noise"),
                       make_scoring_options(config));

  fs::create_directories(config.output_dir);
  std::ostringstream csv;
  csv << "sigma,object_auc_roc,point_auc_roc\n";
  for (const auto& row : rows) {
    csv << format_double(row.sigma) << ',' << format_double(row.object_auc_roc)
        << ',' << format_double(row.point_auc_roc) << '\n';
    std::cout << "sigma " << row.sigma << ": object " << row.object_auc_roc
              << ", point " << row.point_auc_roc << "\n";
  }
  write_file_atomic((fs::path(config.output_dir) / "robustness.csv").string(),
                    csv.str());
  write_run_manifest(config.output_dir, "sweep-noise", config);
}

void run_sweep_patches(const RunConfig& config, const std::string& bench_dir) {
  const Benchmark bench = read_benchmark(bench_dir);
  const auto rows =
      patch_sweep(training_clouds(bench, config), bench.test,
                  config.patch_sweep, make_train_config(config),
                  make_scoring_options(config));

  fs::create_directories(config.output_dir);
  std::ostringstream csv;
  csv << "patches,object_auc_roc,point_auc_roc\n";
  for (const auto& row : rows) {
    csv << row.patch_count << ',' << format_double(row.object_auc_roc) << ','
        << format_double(row.point_auc_roc) << '\n';
    std::cout << "J " << row.patch_count << ": object " << row.object_auc_roc
              << ", point " << row.point_auc_roc << "\n";
  }
  write_file_atomic((fs::path(config.output_dir) / "patch_sweep.csv").string(),
                    csv.str());
  write_run_manifest(config.output_dir, "sweep-patches", config);
}

void run_ablate(const RunConfig& config, const std::string& bench_dir) {
  const Benchmark bench = read_benchmark(bench_dir);
  const auto clouds = training_clouds(bench, config);
  const ScoringOptions opts = make_scoring_options(config);

  std::ostringstream csv;
  csv << "variant,object_auc_roc,point_auc_roc\n";
  for (const auto variant :
       {LossVariant::full, LossVariant::dist_only, LossVariant::dir_only,
        LossVariant::random_direction}) {
    TrainConfig cfg = make_train_config(config);
    cfg.variant = variant;
    const TrainResult result = train(clouds, cfg);
    const EvalReport report = evaluate(result.net, bench.test, opts);
    csv << variant_name(variant) << ','
        << format_double(report.object_auc_roc) << ','
        << format_double(report.point_auc_roc) << '\n';
    std::cout << variant_name(variant) << ": object " << report.object_auc_roc
              << ", point " << report.point_auc_roc << "\n";
  }
  fs::create_directories(config.output_dir);
  write_file_atomic((fs::path(config.output_dir) / "ablation.csv").string(),
                    csv.str());
  write_run_manifest(config.output_dir, "ablate", config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point cloud anomaly detection via per-point offset prediction"};
  app.require_subcommand(1);

  OptionSet bench_opts, augment_opts, train_opts, score_opts, eval_opts,
      noise_opts, patches_opts, ablate_opts;
  std::string input, model, bench_dir;
  bool random_direction = false;

  auto* bench_cmd = app.add_subcommand("bench", "generate a synthetic benchmark");
  bench_opts.add_common(*bench_cmd);

  auto* augment_cmd =
      app.add_subcommand("augment", "write one pseudo-anomaly for a cloud");
  augment_opts.add_common(*augment_cmd);
  augment_cmd->add_option("--input", input, "input cloud (.obj/.ply)")
      ->required();
  augment_cmd->add_flag("--random-direction", random_direction,
                        "patch-wide random direction instead of normals");

  auto* train_cmd = app.add_subcommand("train", "train an offset predictor");
  train_opts.add_common(*train_cmd);
  train_cmd->add_option("--bench", bench_dir, "benchmark directory")->required();

  auto* score_cmd = app.add_subcommand("score", "score one cloud");
  score_opts.add_common(*score_cmd);
  score_cmd->add_option("--model", model, "checkpoint file")->required();
  score_cmd->add_option("--input", input, "input cloud (.obj/.ply)")->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate on a benchmark");
  eval_opts.add_common(*eval_cmd);
  eval_cmd->add_option("--model", model, "checkpoint file")->required();
  eval_cmd->add_option("--bench", bench_dir, "benchmark directory")->required();

  auto* noise_cmd =
      app.add_subcommand("sweep-noise", "noise robustness sweep");
  noise_opts.add_common(*noise_cmd);
  noise_cmd->add_option("--model", model, "checkpoint file")->required();
  noise_cmd->add_option("--bench", bench_dir, "benchmark directory")->required();

  auto* patches_cmd =
      app.add_subcommand("sweep-patches", "train and evaluate per patch count");
  patches_opts.add_common(*patches_cmd);
  patches_cmd->add_option("--bench", bench_dir, "benchmark directory")
      ->required();

  auto* ablate_cmd =
      app.add_subcommand("ablate", "train and evaluate the four loss variants");
  ablate_opts.add_common(*ablate_cmd);
  ablate_cmd->add_option("--bench", bench_dir, "benchmark directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return 1;
  }

  try {
    if (bench_cmd->parsed()) {
      run_bench(bench_opts.resolve());
    } else if (augment_cmd->parsed()) {
      run_augment(augment_opts.resolve(), input, random_direction);
    } else if (train_cmd->parsed()) {
      run_train(train_opts.resolve(), bench_dir);
    } else if (score_cmd->parsed()) {
      run_score(score_opts.resolve(), model, input);
    } else if (eval_cmd->parsed()) {
      run_eval(eval_opts.resolve(), model, bench_dir);
    } else if (noise_cmd->parsed()) {
      run_sweep_noise(noise_opts.resolve(), model, bench_dir);
    } else if (patches_cmd->parsed()) {
      run_sweep_patches(patches_opts.resolve(), bench_dir);
    } else if (ablate_cmd->parsed()) {
      run_ablate(ablate_opts.resolve(), bench_dir);
    }
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
