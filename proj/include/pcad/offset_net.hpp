#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pcad/features.hpp"
#include "pcad/rng.hpp"

namespace pcad {

inline constexpr double kDirEpsilon = 1e-8;
inline constexpr int kDefaultHiddenDim = 64;

// Per-point offset predictor: three affine layers (C -> H -> H -> 3) with
// one learnable PReLU slope after each hidden layer. The same struct holds
// parameters, gradients, and Adam moments, which all share this shape.
struct OffsetNet {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
  double a1 = 0.25, a2 = 0.25;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  int parameter_count() const;

  // Xavier-uniform weights, zero biases, PReLU slopes 0.25.
  static OffsetNet init(int input_dim, int hidden_dim, Rng& rng);
  static OffsetNet zeros_like(const OffsetNet& other);
};

using NetGradients = OffsetNet;

// Flat canonical view over all parameters: w1, b1, a1, w2, b2, a2, w3, b3
// (matrices in column-major element order).
std::vector<double*> parameter_pointers(OffsetNet& net);
std::vector<const double*> parameter_pointers(const OffsetNet& net);
std::string parameter_name(const OffsetNet& net, int flat_index);

// N x 3 predicted offsets.
Eigen::MatrixXd forward(const OffsetNet& net, const FeatureMatrix& features);

struct LossBreakdown {
  double dist = 0.0;
  double dir = 0.0;
  double total = 0.0;  // dist + dir, exactly
};

enum class LossVariant { full, dist_only, dir_only, random_direction };

LossVariant parse_variant(const std::string& name);
std::string variant_name(LossVariant variant);

// Mean per-point L1 norm of the residual.
double loss_dist(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& gt);

// Negative mean cosine between predicted and ground-truth offsets; zero
// ground-truth rows contribute nothing (their normalized vector is zero).
double loss_dir(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& gt);

struct LossAndGrad {
  LossBreakdown loss;
  NetGradients grads;
  Eigen::MatrixXd input_grads;  // N x C, d(loss)/d(feature row)
};

// Reverse-mode gradients of the variant's loss through the losses and the
// MLP. Subgradient conventions: |x| at 0 -> 0, PReLU at 0 -> slope 1.
LossAndGrad loss_and_grad(const OffsetNet& net, const FeatureMatrix& features,
                          const Eigen::MatrixXd& gt,
                          LossVariant variant = LossVariant::full);

// Per-point saliency: L2 norm of the loss gradient w.r.t. the point's
// feature row.
std::vector<double> export_attention(const OffsetNet& net,
                                     const FeatureMatrix& features,
                                     const Eigen::MatrixXd& gt);

struct AdamState {
  OffsetNet m, v;
  long step = 0;

  static AdamState zeros_like(const OffsetNet& net);
};

// Standard Adam (beta1 0.9, beta2 0.999, eps 1e-8) with the supplied
// learning rate.
void adam_step(OffsetNet& net, const NetGradients& grads, AdamState& state,
               double lr);

// 0.5 * lr0 * (1 + cos(pi * t / T)).
double cosine_lr(long step, long total_steps, double lr0);

// Text checkpoint: a `pcad-offsetnet 1` magic line, dims, then one
// `<name> <rows> <cols>` header per tensor followed by its values in
// row-major order, full precision.
void save_checkpoint(const std::string& path, const OffsetNet& net);
OffsetNet load_checkpoint(const std::string& path);

Eigen::MatrixXd offsets_to_matrix(const std::vector<Vec3>& offsets);

}  // namespace pcad
