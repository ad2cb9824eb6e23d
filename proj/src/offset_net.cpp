#include "pcad/offset_net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pcad/io.hpp"

namespace pcad {

int OffsetNet::parameter_count() const {
  return static_cast<int>(w1.size() + b1.size() + w2.size() + b2.size() +
                          w3.size() + b3.size() + 2);
}

OffsetNet OffsetNet::init(int input_dim, int hidden_dim, Rng& rng) {
  if (input_dim < 1 || hidden_dim < 1) {
    throw data_error("net dimensions must be positive");
  }
  OffsetNet net;
  auto xavier = [&](Eigen::MatrixXd& w, int rows, int cols) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    w.resize(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
  };
  xavier(net.w1, hidden_dim, input_dim);
  xavier(net.w2, hidden_dim, hidden_dim);
  xavier(net.w3, 3, hidden_dim);
  net.b1 = Eigen::VectorXd::Zero(hidden_dim);
  net.b2 = Eigen::VectorXd::Zero(hidden_dim);
  net.b3 = Eigen::VectorXd::Zero(3);
  return net;
}

OffsetNet OffsetNet::zeros_like(const OffsetNet& other) {
  OffsetNet net;
  net.w1 = Eigen::MatrixXd::Zero(other.w1.rows(), other.w1.cols());
  net.w2 = Eigen::MatrixXd::Zero(other.w2.rows(), other.w2.cols());
  net.w3 = Eigen::MatrixXd::Zero(other.w3.rows(), other.w3.cols());
  net.b1 = Eigen::VectorXd::Zero(other.b1.size());
  net.b2 = Eigen::VectorXd::Zero(other.b2.size());
  net.b3 = Eigen::VectorXd::Zero(other.b3.size());
  net.a1 = 0.0;
  net.a2 = 0.0;
  return net;
}

std::vector<double*> parameter_pointers(OffsetNet& net) {
  std::vector<double*> ptrs;
  ptrs.reserve(net.parameter_count());
  auto push = [&](double* data, long count) {
    for (long i = 0; i < count; ++i) {
      ptrs.push_back(data + i);
    }
  };
  push(net.w1.data(), net.w1.size());
  push(net.b1.data(), net.b1.size());
  ptrs.push_back(&net.a1);
  push(net.w2.data(), net.w2.size());
  push(net.b2.data(), net.b2.size());
  ptrs.push_back(&net.a2);
  push(net.w3.data(), net.w3.size());
  push(net.b3.data(), net.b3.size());
  return ptrs;
}

std::vector<const double*> parameter_pointers(const OffsetNet& net) {
  auto ptrs = parameter_pointers(const_cast<OffsetNet&>(net));
  return {ptrs.begin(), ptrs.end()};
}

std::string parameter_name(const OffsetNet& net, int flat_index) {
  struct Segment {
    const char* name;
    long size;
  };
  const Segment segments[] = {
      {"w1", net.w1.size()}, {"b1", net.b1.size()}, {"a1", 1},
      {"w2", net.w2.size()}, {"b2", net.b2.size()}, {"a2", 1},
      {"w3", net.w3.size()}, {"b3", net.b3.size()},
  };
  long offset = flat_index;
  for (const auto& seg : segments) {
    if (offset < seg.size) {
      return std::string(seg.name) + "[" + std::to_string(offset) + "]";
    }
    offset -= seg.size;
  }
  return "param[" + std::to_string(flat_index) + "]";
}

namespace {

Eigen::MatrixXd prelu(const Eigen::MatrixXd& z, double slope) {
  return z.array().max(0.0) + slope * z.array().min(0.0);
}

struct ForwardCache {
  Eigen::MatrixXd z1, h1, z2, h2, pred;
};

ForwardCache forward_cached(const OffsetNet& net,
                            const FeatureMatrix& features) {
  if (features.cols() != net.input_dim()) {
    throw data_error("feature width " + std::to_string(features.cols()) +
                     " does not match net input " +
                     std::to_string(net.input_dim()));
  }
  ForwardCache cache;
  cache.z1.noalias() = features * net.w1.transpose();
  cache.z1.rowwise() += net.b1.transpose();
  cache.h1 = prelu(cache.z1, net.a1);
  cache.z2.noalias() = cache.h1 * net.w2.transpose();
  cache.z2.rowwise() += net.b2.transpose();
  cache.h2 = prelu(cache.z2, net.a2);
  cache.pred.noalias() = cache.h2 * net.w3.transpose();
  cache.pred.rowwise() += net.b3.transpose();
  return cache;
}

}  // namespace

Eigen::MatrixXd forward(const OffsetNet& net, const FeatureMatrix& features) {
  return forward_cached(net, features).pred;
}

LossVariant parse_variant(const std::string& name) {
  if (name == "full") return LossVariant::full;
  if (name == "dist_only") return LossVariant::dist_only;
  if (name == "dir_only") return LossVariant::dir_only;
  if (name == "random_direction") return LossVariant::random_direction;
  throw data_error("unknown variant '" + name + "'");
}

std::string variant_name(LossVariant variant) {
  switch (variant) {
    case LossVariant::full: return "full";
    case LossVariant::dist_only: return "dist_only";
    case LossVariant::dir_only: return "dir_only";
    case LossVariant::random_direction: return "random_direction";
  }
  return "full";
}

double loss_dist(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != 3 || gt.cols() != 3) {
    throw data_error("prediction/ground-truth shape mismatch");
  }
  return (pred - gt).cwiseAbs().sum() / static_cast<double>(pred.rows());
}

double loss_dir(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != 3 || gt.cols() != 3) {
    throw data_error("prediction/ground-truth shape mismatch");
  }
  const long n = pred.rows();
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const Eigen::Vector3d p = pred.row(i);
    const Eigen::Vector3d g = gt.row(i);
    sum += (p / (p.norm() + kDirEpsilon)).dot(g / (g.norm() + kDirEpsilon));
  }
  return -sum / static_cast<double>(n);
}

LossAndGrad loss_and_grad(const OffsetNet& net, const FeatureMatrix& features,
                          const Eigen::MatrixXd& gt, LossVariant variant) {
  const ForwardCache cache = forward_cached(net, features);
  const long n = features.rows();
  if (gt.rows() != n || gt.cols() != 3) {
    throw data_error("ground-truth shape mismatch");
  }
  const double w_dist = variant == LossVariant::dir_only ? 0.0 : 1.0;
  const double w_dir = variant == LossVariant::dist_only ? 0.0 : 1.0;

  LossAndGrad out;
  out.loss.dist = w_dist == 0.0 ? 0.0 : loss_dist(cache.pred, gt);
  out.loss.dir = w_dir == 0.0 ? 0.0 : loss_dir(cache.pred, gt);
  out.loss.total = out.loss.dist + out.loss.dir;

  // d(loss)/d(pred), both terms. L1 subgradient at zero residual is zero.
  Eigen::MatrixXd dpred = Eigen::MatrixXd::Zero(n, 3);
  if (w_dist != 0.0) {
    dpred = (cache.pred - gt).array().sign().matrix() / static_cast<double>(n);
  }
  if (w_dir != 0.0) {
    for (long i = 0; i < n; ++i) {
      const Eigen::Vector3d p = cache.pred.row(i);
      const Eigen::Vector3d g = gt.row(i);
      const Eigen::Vector3d v = g / (g.norm() + kDirEpsilon);
      const double r = p.norm();
      Eigen::Vector3d grad;
      if (r > 0.0) {
        const double denom = r + kDirEpsilon;
        grad = v / denom - p * (p.dot(v) / (r * denom * denom));
      } else {
        grad = v / kDirEpsilon;
      }
      dpred.row(i) -= grad.transpose() / static_cast<double>(n);
    }
  }

  NetGradients grads = OffsetNet::zeros_like(net);
  grads.w3.noalias() = dpred.transpose() * cache.h2;
  grads.b3 = dpred.colwise().sum();

  // PReLU: dz = dh * (z >= 0 ? 1 : slope); d(slope) accumulates dh * z on
  // the negative side.
  auto prelu_slope_mask = [](const Eigen::MatrixXd& z, double slope) {
    return (z.array() >= 0.0).cast<double>() * (1.0 - slope) + slope;
  };
  Eigen::MatrixXd dh2;
  dh2.noalias() = dpred * net.w3;
  grads.a2 = (dh2.array() * cache.z2.array().min(0.0)).sum();
  Eigen::MatrixXd dz2 = dh2.array() * prelu_slope_mask(cache.z2, net.a2);
  grads.w2.noalias() = dz2.transpose() * cache.h1;
  grads.b2 = dz2.colwise().sum();

  Eigen::MatrixXd dh1;
  dh1.noalias() = dz2 * net.w2;
  grads.a1 = (dh1.array() * cache.z1.array().min(0.0)).sum();
  Eigen::MatrixXd dz1 = dh1.array() * prelu_slope_mask(cache.z1, net.a1);
  grads.w1.noalias() = dz1.transpose() * features;
  grads.b1 = dz1.colwise().sum();

  out.input_grads.noalias() = dz1 * net.w1;

  OffsetNet& g = grads;
  auto finite = [](const Eigen::MatrixXd& m) { return m.allFinite(); };
  const std::pair<const char*, bool> checks[] = {
      {"w1", finite(g.w1)}, {"b1", finite(g.b1)}, {"a1", std::isfinite(g.a1)},
      {"w2", finite(g.w2)}, {"b2", finite(g.b2)}, {"a2", std::isfinite(g.a2)},
      {"w3", finite(g.w3)}, {"b3", finite(g.b3)},
  };
  for (const auto& [name, ok] : checks) {
    if (!ok) {
      throw numeric_error(std::string("non-finite gradient in ") + name);
    }
  }
  out.grads = std::move(grads);
  return out;
}

std::vector<double> export_attention(const OffsetNet& net,
                                     const FeatureMatrix& features,
                                     const Eigen::MatrixXd& gt) {
  const auto result = loss_and_grad(net, features, gt, LossVariant::full);
  std::vector<double> saliency(features.rows());
  for (long i = 0; i < features.rows(); ++i) {
    saliency[i] = result.input_grads.row(i).norm();
  }
  return saliency;
}

AdamState AdamState::zeros_like(const OffsetNet& net) {
  AdamState state;
  state.m = OffsetNet::zeros_like(net);
  state.v = OffsetNet::zeros_like(net);
  return state;
}

void adam_step(OffsetNet& net, const NetGradients& grads, AdamState& state,
               double lr) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

  auto params = parameter_pointers(net);
  auto gs = parameter_pointers(grads);
  auto ms = parameter_pointers(state.m);
  auto vs = parameter_pointers(state.v);
  if (gs.size() != params.size()) {
    throw data_error("gradient shape does not match net");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = *gs[i];
    double& m = *ms[i];
    double& v = *vs[i];
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    *params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    if (!std::isfinite(*params[i])) {
      throw numeric_error("non-finite parameter after update: " +
                          parameter_name(net, static_cast<int>(i)));
    }
  }
}

double cosine_lr(long step, long total_steps, double lr0) {
  if (total_steps <= 0) {
    throw data_error("cosine schedule needs total steps > 0");
  }
  if (step < 0 || step > total_steps) {
    throw data_error("cosine schedule step out of range");
  }
  return 0.5 * lr0 *
         (1.0 + std::cos(M_PI * static_cast<double>(step) /
                         static_cast<double>(total_steps)));
}

namespace {

void write_tensor(std::ostream& out, const char* name,
                  const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_tensor(std::istream& in, const std::string& expect_name) {
  std::string name;
  long rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expect_name || rows < 1 ||
      cols < 1) {
    throw parse_error("checkpoint: bad tensor header for " + expect_name);
  }
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) {
        throw parse_error("checkpoint: truncated tensor " + expect_name);
      }
    }
  }
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const OffsetNet& net) {
  std::ostringstream out;
  out << "pcad-offsetnet 1\n";
  out << "input " << net.input_dim() << "\nhidden " << net.hidden_dim() << '\n';
  write_tensor(out, "w1", net.w1);
  write_tensor(out, "b1", net.b1);
  out << "a1 1 1\n" << format_double(net.a1) << '\n';
  write_tensor(out, "w2", net.w2);
  write_tensor(out, "b2", net.b2);
  out << "a2 1 1\n" << format_double(net.a2) << '\n';
  write_tensor(out, "w3", net.w3);
  write_tensor(out, "b3", net.b3);
  write_file_atomic(path, out.str());
}

OffsetNet load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open checkpoint '" + path + "'");
  }
  std::string magic, version;
  in >> magic >> version;
  if (magic != "pcad-offsetnet" || version != "1") {
    throw parse_error("not a pcad-offsetnet checkpoint: " + path);
  }
  std::string key;
  int input = 0, hidden = 0;
  in >> key >> input;
  if (key != "input") throw parse_error("checkpoint: expected input dim");
  in >> key >> hidden;
  if (key != "hidden") throw parse_error("checkpoint: expected hidden dim");

  OffsetNet net;
  net.w1 = read_tensor(in, "w1");
  net.b1 = read_tensor(in, "b1");
  net.a1 = read_tensor(in, "a1")(0, 0);
  net.w2 = read_tensor(in, "w2");
  net.b2 = read_tensor(in, "b2");
  net.a2 = read_tensor(in, "a2")(0, 0);
  net.w3 = read_tensor(in, "w3");
  net.b3 = read_tensor(in, "b3");

  if (net.w1.rows() != hidden || net.w1.cols() != input ||
      net.w2.rows() != hidden || net.w2.cols() != hidden ||
      net.w3.rows() != 3 || net.w3.cols() != hidden ||
      net.b1.size() != hidden || net.b2.size() != hidden ||
      net.b3.size() != 3) {
    throw parse_error("checkpoint: tensor shapes disagree with header");
  }
  return net;
}

Eigen::MatrixXd offsets_to_matrix(const std::vector<Vec3>& offsets) {
  Eigen::MatrixXd m(offsets.size(), 3);
  for (size_t i = 0; i < offsets.size(); ++i) {
    m.row(i) = offsets[i].transpose();
  }
  return m;
}

}  // namespace pcad
