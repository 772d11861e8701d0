#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "eegbench/core/error.hpp"

namespace eegbench::eval {

/// Midranks (1-based) of `x`; tied values share the mean of their ranks.
inline std::vector<double> midranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double mid = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
    i = j + 1;
  }
  return r;
}

/// Area under the ROC curve via the Mann–Whitney statistic, ties counted half.
/// `positive` marks the positive class.
inline double roc_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  require(scores.size() == positive.size(), ErrorCode::DimensionMismatch, "scores and labels differ in length");
  for (double s : scores) require(!std::isnan(s), ErrorCode::InvalidInput, "NaN score");
  const auto n_pos = double(std::count(positive.begin(), positive.end(), true));
  const double n_neg = double(positive.size()) - n_pos;
  require(n_pos > 0 && n_neg > 0, ErrorCode::UndefinedMetric, "ROC-AUC needs both classes present");
  const auto r = midranks(scores);
  double rank_sum = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (positive[i]) rank_sum += r[i];
  const double u = rank_sum - n_pos * (n_pos + 1) / 2;
  return std::clamp(u / (n_pos * n_neg), 0.0, 1.0);
}

/// Binary labels: the larger label value is positive.
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(!labels.empty(), ErrorCode::UndefinedMetric, "no labels");
  const int hi = *std::max_element(labels.begin(), labels.end());
  const int lo = *std::min_element(labels.begin(), labels.end());
  require(hi != lo, ErrorCode::UndefinedMetric, "ROC-AUC needs both classes present");
  std::vector<bool> pos(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] == hi || labels[i] == lo, ErrorCode::UndefinedMetric, "ROC-AUC needs binary labels");
    pos[i] = labels[i] == hi;
  }
  return roc_auc(scores, pos);
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  require(predicted.size() == labels.size(), ErrorCode::DimensionMismatch, "prediction and label counts differ");
  require(!labels.empty(), ErrorCode::UndefinedMetric, "no labels");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hit += predicted[i] == labels[i];
  return double(hit) / double(labels.size());
}

}  // namespace eegbench::eval
