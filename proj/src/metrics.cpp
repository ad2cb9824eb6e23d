#include "pcad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcad {

double point_score(const Vec3& offset) {
  if (!offset.allFinite()) {
    throw numeric_error("non-finite offset in point score");
  }
  return offset.cwiseAbs().sum();
}

double object_score(const std::vector<double>& scores) {
  if (scores.empty()) {
    throw data_error("object score of an empty cloud");
  }
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

namespace {

void check_labels(const std::vector<double>& scores,
                  const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw data_error("scores and labels must align and be nonempty");
  }
  for (const int l : labels) {
    if (l != 0 && l != 1) {
      throw data_error("labels must be 0 or 1");
    }
  }
}

}  // namespace

double auc_roc(const std::vector<double>& scores,
               const std::vector<int>& labels) {
  check_labels(scores, labels);
  const size_t n = scores.size();
  const long n_pos = std::count(labels.begin(), labels.end(), 1);
  const long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw data_error("AUC-ROC undefined for single-class input");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });

  // Midranks over tie groups, then the rank-sum form of Mann-Whitney U.
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        pos_rank_sum += midrank;
      }
    }
    i = j;
  }
  const double u = pos_rank_sum -
                   0.5 * static_cast<double>(n_pos) *
                       static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(const std::vector<double>& scores,
              const std::vector<int>& labels) {
  check_labels(scores, labels);
  const long n_pos = std::count(labels.begin(), labels.end(), 1);
  if (n_pos == 0) {
    throw data_error("AUC-PR undefined without positives");
  }

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] > scores[b]; });

  double area = 0.0;
  double prev_recall = 0.0;
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    const double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return area;
}

std::vector<double> mean_rank(const Eigen::MatrixXd& metric_table) {
  const long methods = metric_table.rows();
  const long categories = metric_table.cols();
  if (methods < 1 || categories < 1) {
    throw data_error("mean rank needs a nonempty table");
  }

  std::vector<double> rank_sum(methods, 0.0);
  std::vector<int> order(methods);
  for (long c = 0; c < categories; ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return metric_table(a, c) > metric_table(b, c);
    });
    long i = 0;
    while (i < methods) {
      long j = i;
      while (j < methods &&
             metric_table(order[j], c) == metric_table(order[i], c)) {
        ++j;
      }
      const double shared = 0.5 * static_cast<double>(i + 1 + j);
      for (long t = i; t < j; ++t) {
        rank_sum[order[t]] += shared;
      }
      i = j;
    }
  }
  for (auto& r : rank_sum) {
    r /= static_cast<double>(categories);
  }
  return rank_sum;
}

}  // namespace pcad
