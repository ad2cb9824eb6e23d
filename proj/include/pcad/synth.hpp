#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcad/rng.hpp"
#include "pcad/scoring.hpp"
#include "pcad/types.hpp"

namespace pcad {

enum class ShapeKind { sphere, cylinder, torus, capsule };

ShapeKind parse_shape_kind(const std::string& name);
std::string shape_kind_name(ShapeKind kind);

// A deterministic synthetic category: surface shape, sampling density, and
// train/test split sizes. Test anomalies are injected with the same
// normal-guided displacement as training augmentation, from an independent
// seed stream and a slightly wider beta range.
struct SynthCategory {
  ShapeKind kind = ShapeKind::sphere;
  double radius = 1.0;   // sphere/cylinder/capsule radius, torus tube radius
  double extent = 1.6;   // cylinder/capsule height, torus ring radius
  double jitter = 0.02;  // relative per-instance parameter jitter
  int points = 2048;
  int train_count = 4;
  int test_count = 40;
  double anomaly_fraction = 0.5;
  int test_patch_count = kDefaultPatchCount;
  std::array<double, 2> test_beta_range = {0.05, 0.14};
  std::uint64_t seed = 0;
  std::string name = "sphere";
};

// N quasi-uniform surface points with analytic outward unit normals;
// shape parameters are jittered per draw.
PointCloud sample_shape(const SynthCategory& category, Rng& rng);

struct Benchmark {
  std::vector<PointCloud> train;        // normal clouds only
  std::vector<LabeledInstance> test;
};

// Train and test derive from disjoint streams of category.seed; a
// test-seed override regenerates only the test side.
Benchmark build_benchmark(const SynthCategory& category);
Benchmark build_benchmark(const SynthCategory& category,
                          std::uint64_t test_seed);

// Directory layout: train/*.ply, test/*.ply, masks/*.csv, labels.csv
// (file,object_label,mask_file), manifest.json with every seed and
// parameter.
void write_benchmark(const std::string& dir, const Benchmark& bench,
                     const SynthCategory& category);
Benchmark read_benchmark(const std::string& dir);

}  // namespace pcad
