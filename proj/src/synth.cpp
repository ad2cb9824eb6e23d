#include "pcad/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pcad/augment.hpp"
#include "pcad/io.hpp"
#include "pcad/transforms.hpp"

namespace fs = std::filesystem;

namespace pcad {

ShapeKind parse_shape_kind(const std::string& name) {
  if (name == "sphere") return ShapeKind::sphere;
  if (name == "cylinder") return ShapeKind::cylinder;
  if (name == "torus") return ShapeKind::torus;
  if (name == "capsule") return ShapeKind::capsule;
  throw data_error("unknown shape kind '" + name + "'");
}

std::string shape_kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::torus: return "torus";
    case ShapeKind::capsule: return "capsule";
  }
  return "sphere";
}

namespace {

void append(PointCloud& cloud, const Vec3& p, const Vec3& n) {
  cloud.points.push_back(p);
  cloud.normals.push_back(n);
}

void sample_sphere(PointCloud& cloud, double r, int n, Rng& rng) {
  for (int i = 0; i < n; ++i) {
    const Vec3 d = rng.unit_vector();
    append(cloud, r * d, d);
  }
}

// Closed cylinder: lateral surface plus two end discs, area weighted.
void sample_cylinder(PointCloud& cloud, double r, double h, int n, Rng& rng) {
  const double side_area = 2.0 * M_PI * r * h;
  const double cap_area = M_PI * r * r;
  const double total = side_area + 2.0 * cap_area;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(0.0, total);
    if (u < side_area) {
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      const double z = rng.uniform(-0.5 * h, 0.5 * h);
      append(cloud, {r * std::cos(theta), r * std::sin(theta), z},
             {std::cos(theta), std::sin(theta), 0.0});
    } else {
      const double sign = u < side_area + cap_area ? 1.0 : -1.0;
      const double rho = r * std::sqrt(rng.uniform01());
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      append(cloud, {rho * std::cos(theta), rho * std::sin(theta), sign * 0.5 * h},
             {0.0, 0.0, sign});
    }
  }
}

// Torus with ring radius R and tube radius r; the tube angle is rejection
// sampled against the R + r*cos(v) area density.
void sample_torus(PointCloud& cloud, double ring, double tube, int n,
                  Rng& rng) {
  for (int i = 0; i < n; ++i) {
    double v;
    do {
      v = rng.uniform(0.0, 2.0 * M_PI);
    } while (rng.uniform(0.0, ring + tube) >= ring + tube * std::cos(v));
    const double u = rng.uniform(0.0, 2.0 * M_PI);
    const double w = ring + tube * std::cos(v);
    append(cloud, {w * std::cos(u), w * std::sin(u), tube * std::sin(v)},
           {std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v)});
  }
}

// Cylinder side with hemispherical end caps; the two caps together form a
// full sphere, so cap draws reuse uniform sphere directions.
void sample_capsule(PointCloud& cloud, double r, double h, int n, Rng& rng) {
  const double side_area = 2.0 * M_PI * r * h;
  const double caps_area = 4.0 * M_PI * r * r;
  const double total = side_area + caps_area;
  for (int i = 0; i < n; ++i) {
    if (rng.uniform(0.0, total) < side_area) {
      const double theta = rng.uniform(0.0, 2.0 * M_PI);
      const double z = rng.uniform(-0.5 * h, 0.5 * h);
      append(cloud, {r * std::cos(theta), r * std::sin(theta), z},
             {std::cos(theta), std::sin(theta), 0.0});
    } else {
      const Vec3 d = rng.unit_vector();
      const double center = d.z() >= 0.0 ? 0.5 * h : -0.5 * h;
      append(cloud, Vec3(r * d.x(), r * d.y(), center + r * d.z()), d);
    }
  }
}

}  // namespace

PointCloud sample_shape(const SynthCategory& category, Rng& rng) {
  if (category.points < 1 || !(category.radius > 0.0) ||
      !(category.extent > 0.0) || category.jitter < 0.0 ||
      category.jitter >= 1.0) {
    throw data_error("invalid synthetic category parameters");
  }
  const double r =
      category.radius * rng.uniform(1.0 - category.jitter, 1.0 + category.jitter);
  const double e =
      category.extent * rng.uniform(1.0 - category.jitter, 1.0 + category.jitter);

  PointCloud cloud;
  cloud.category = category.name;
  cloud.points.reserve(category.points);
  cloud.normals.reserve(category.points);
  switch (category.kind) {
    case ShapeKind::sphere:
      sample_sphere(cloud, r, category.points, rng);
      break;
    case ShapeKind::cylinder:
      sample_cylinder(cloud, r, e, category.points, rng);
      break;
    case ShapeKind::torus:
      if (e <= r) {
        throw data_error("torus needs ring radius > tube radius");
      }
      sample_torus(cloud, e, r, category.points, rng);
      break;
    case ShapeKind::capsule:
      sample_capsule(cloud, r, e, category.points, rng);
      break;
  }
  return cloud;
}

namespace {

Benchmark build_impl(const SynthCategory& category, std::uint64_t train_seed,
                     std::uint64_t test_seed) {
  if (category.train_count < 1 || category.test_count < 1 ||
      !(category.anomaly_fraction > 0.0) ||
      !(category.anomaly_fraction < 1.0) ||
      category.points < category.test_patch_count) {
    throw data_error("invalid benchmark category");
  }

  Benchmark bench;
  for (int i = 0; i < category.train_count; ++i) {
    Rng rng(split_seed(train_seed, "cloud", i));
    bench.train.push_back(sample_shape(category, rng));
  }

  const int n_anomalous = static_cast<int>(
      std::llround(category.anomaly_fraction * category.test_count));
  for (int q = 0; q < category.test_count; ++q) {
    Rng rng(split_seed(test_seed, "instance", q));
    const PointCloud normalized = normalize(sample_shape(category, rng));

    LabeledInstance instance;
    if (q < n_anomalous) {
      const PseudoAnomalySample sample = generate_pseudo_anomaly(
          normalized, category.test_patch_count, category.test_beta_range, rng);
      instance.cloud = sample.cloud;
      instance.object_label = 1;
      instance.point_labels.resize(sample.gt_offsets.size());
      for (size_t i = 0; i < sample.gt_offsets.size(); ++i) {
        // A point counts as anomalous only when it actually moved; the
        // w = 1 boundary point of a patch stays in place.
        instance.point_labels[i] = sample.gt_offsets[i].norm() > 1e-9;
      }
    } else {
      instance.cloud = normalized;
      instance.object_label = 0;
    }
    bench.test.push_back(std::move(instance));
  }
  return bench;
}

}  // namespace

Benchmark build_benchmark(const SynthCategory& category) {
  return build_impl(category, split_seed(category.seed, "train"),
                    split_seed(category.seed, "test"));
}

Benchmark build_benchmark(const SynthCategory& category,
                          std::uint64_t test_seed) {
  return build_impl(category, split_seed(category.seed, "train"), test_seed);
}

void write_benchmark(const std::string& dir, const Benchmark& bench,
                     const SynthCategory& category) {
  fs::create_directories(fs::path(dir) / "train");
  fs::create_directories(fs::path(dir) / "test");
  fs::create_directories(fs::path(dir) / "masks");

  char name[64];
  for (size_t i = 0; i < bench.train.size(); ++i) {
    std::snprintf(name, sizeof(name), "train/train_%03zu.ply", i);
    write_ply((fs::path(dir) / name).string(), bench.train[i]);
  }

  std::ostringstream labels;
  labels << "file,object_label,mask_file\n";
  for (size_t q = 0; q < bench.test.size(); ++q) {
    std::snprintf(name, sizeof(name), "test/test_%03zu.ply", q);
    write_ply((fs::path(dir) / name).string(), bench.test[q].cloud);
    std::string mask_file;
    if (!bench.test[q].point_labels.empty()) {
      char mask_name[64];
      std::snprintf(mask_name, sizeof(mask_name), "masks/test_%03zu_mask.csv",
                    q);
      write_mask_csv((fs::path(dir) / mask_name).string(),
                     bench.test[q].point_labels);
      mask_file = mask_name;
    }
    labels << name << ',' << bench.test[q].object_label << ',' << mask_file
           << '\n';
  }
  write_file_atomic((fs::path(dir) / "labels.csv").string(), labels.str());

  nlohmann::json manifest;
  manifest["kind"] = shape_kind_name(category.kind);
  manifest["name"] = category.name;
  manifest["radius"] = category.radius;
  manifest["extent"] = category.extent;
  manifest["jitter"] = category.jitter;
  manifest["points"] = category.points;
  manifest["train_count"] = category.train_count;
  manifest["test_count"] = category.test_count;
  manifest["anomaly_fraction"] = category.anomaly_fraction;
  manifest["test_patch_count"] = category.test_patch_count;
  manifest["test_beta_min"] = category.test_beta_range[0];
  manifest["test_beta_max"] = category.test_beta_range[1];
  manifest["seed"] = category.seed;
  manifest["train_seed"] = split_seed(category.seed, "train");
  manifest["test_seed"] = split_seed(category.seed, "test");
  write_file_atomic((fs::path(dir) / "manifest.json").string(),
                    manifest.dump(2) + "\n");
}

Benchmark read_benchmark(const std::string& dir) {
  Benchmark bench;
  std::vector<fs::path> train_files;
  for (const auto& entry : fs::directory_iterator(fs::path(dir) / "train")) {
    if (entry.path().extension() == ".ply") {
      train_files.push_back(entry.path());
    }
  }
  std::sort(train_files.begin(), train_files.end());
  for (const auto& path : train_files) {
    bench.train.push_back(read_ply(path.string()).cloud);
  }

  std::ifstream labels((fs::path(dir) / "labels.csv").string());
  if (!labels) {
    throw data_error("benchmark directory lacks labels.csv");
  }
  std::string line;
  std::getline(labels, line);  // header
  while (std::getline(labels, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string file, label, mask_file;
    std::getline(row, file, ',');
    std::getline(row, label, ',');
    std::getline(row, mask_file, ',');

    LabeledInstance instance;
    instance.cloud = read_ply((fs::path(dir) / file).string()).cloud;
    instance.object_label = label == "1" ? 1 : 0;
    if (!mask_file.empty()) {
      instance.point_labels =
          read_mask_csv((fs::path(dir) / mask_file).string());
      if (instance.point_labels.size() != instance.cloud.points.size()) {
        throw data_error("mask size mismatch for " + file);
      }
    }
    bench.test.push_back(std::move(instance));
  }
  if (bench.train.empty() || bench.test.empty()) {
    throw data_error("benchmark directory is incomplete");
  }
  return bench;
}

}  // namespace pcad
