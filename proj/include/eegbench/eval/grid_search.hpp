#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/random.hpp"
#include "eegbench/dsp/epochs.hpp"
#include "eegbench/eval/metrics.hpp"
#include "eegbench/eval/split.hpp"
#include "eegbench/pipelines/catalog.hpp"

namespace eegbench::eval {

enum class Metric { RocAuc, Accuracy };

inline std::string to_string(Metric m) { return m == Metric::RocAuc ? "roc_auc" : "accuracy"; }

inline Metric parse_metric(std::string_view s) {
  if (s == "roc_auc") return Metric::RocAuc;
  if (s == "accuracy") return Metric::Accuracy;
  fail(ErrorCode::InvalidConfig, "unknown metric '" + std::string(s) + "'");
}

/// ROC-AUC ranks trials by the probability of the largest training label.
inline double score_model(const pipelines::Model& model, const dsp::Epochs& test, Metric metric) {
  if (metric == Metric::Accuracy) return accuracy(model.predict(test), test.labels);
  require(model.classes().size() == 2, ErrorCode::UndefinedMetric, "ROC-AUC needs a binary model");
  const pipelines::Matrix p = model.predict_proba(test);
  std::vector<double> s(std::size_t(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) s[std::size_t(i)] = p(i, 1);
  std::vector<bool> pos(test.labels.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = test.labels[i] == model.classes()[1];
  return roc_auc(s, pos);
}

struct Candidate {
  pipelines::Hyper hyper;
  bool ok = false;
  double score = 0;  // mean inner-fold metric when ok
  std::string error;
};

struct GridSearchResult {
  pipelines::Hyper best;
  std::vector<Candidate> candidates;  // empty when nothing had to be compared
};

/// Exhaustive search scored by inner stratified K-fold on `train` only.
/// Ties keep the earliest candidate. The caller refits on all of `train`.
inline GridSearchResult nested_grid_search(std::string_view pipeline, const dsp::Epochs& train,
                                           const pipelines::Grid& grid, int inner_folds, std::uint64_t seed,
                                           Metric metric) {
  const auto hypers = pipelines::expand_grid(grid);
  GridSearchResult out;
  if (hypers.size() == 1) {
    out.best = hypers.front();
    return out;
  }
  const auto folds = stratified_kfold(train.labels, inner_folds, seed);
  std::vector<dsp::Epochs> tr, te;
  for (const auto& f : folds) {
    tr.push_back(train.subset(f.train));
    te.push_back(train.subset(f.test));
  }
  int best = -1;
  for (std::size_t c = 0; c < hypers.size(); ++c) {
    Candidate cand;
    cand.hyper = hypers[c];
    try {
      double sum = 0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto model = pipelines::fit(pipeline, tr[f], hypers[c], derive_seed(seed, c, f));
        sum += score_model(*model, te[f], metric);
      }
      cand.ok = true;
      cand.score = sum / double(folds.size());
      if (best < 0 || cand.score > out.candidates[std::size_t(best)].score) best = int(c);
    } catch (const Error& e) {
      cand.error = e.what();
    }
    out.candidates.push_back(std::move(cand));
  }
  if (best < 0) {
    std::string msg = "all " + std::to_string(hypers.size()) + " candidates failed:";
    for (const auto& c : out.candidates) msg += " [" + c.error + "]";
    fail(ErrorCode::GridExhausted, msg);
  }
  out.best = out.candidates[std::size_t(best)].hyper;
  return out;
}

}  // namespace eegbench::eval
