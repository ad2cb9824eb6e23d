#pragma once

#include <vector>

#include "pcad/types.hpp"

namespace pcad {

// Sum of absolute offset components.
double point_score(const Vec3& offset);

// Arithmetic mean of point scores.
double object_score(const std::vector<double>& scores);

// Mann-Whitney AUC via midranks: P(score_pos > score_neg) + 0.5 P(tie).
// Throws unless both classes are present.
double auc_roc(const std::vector<double>& scores,
               const std::vector<int>& labels);

// Area under precision-recall with step interpolation at distinct
// thresholds, highest score first. Throws without a positive.
double auc_pr(const std::vector<double>& scores,
              const std::vector<int>& labels);

// table(m, c) = metric of method m on category c. Rank 1 is best per
// category (descending metric, ties share the average rank); returns the
// per-method mean rank over categories.
std::vector<double> mean_rank(const Eigen::MatrixXd& metric_table);

}  // namespace pcad
