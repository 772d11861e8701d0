#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/random.hpp"

namespace eegbench::eval {

using Indices = std::vector<std::size_t>;

struct Fold {
  Indices train;
  Indices test;
};

/// Shuffled stratified K-fold. Each class is permuted, then dealt round-robin
/// over the folds, continuing where the previous class stopped so fold sizes
/// differ by at most one overall and per class.
inline std::vector<Fold> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
  require(k >= 2, ErrorCode::InvalidConfig, "need at least two folds");
  std::map<int, Indices> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [c, idx] : by_class)
    require(idx.size() >= std::size_t(k), ErrorCode::StratificationImpossible,
            "class " + std::to_string(c) + " has " + std::to_string(idx.size()) + " trials for " +
                std::to_string(k) + " folds");
  require(!by_class.empty(), ErrorCode::StratificationImpossible, "no trials");

  Rng rng(seed);
  std::vector<Indices> tests(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (auto& [c, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) {
      tests[next].push_back(i);
      next = (next + 1) % std::size_t(k);
    }
  }
  std::vector<Fold> folds;
  for (auto& t : tests) {
    std::sort(t.begin(), t.end());
    Fold f;
    f.test = t;
    std::vector<bool> in_test(labels.size(), false);
    for (std::size_t i : t) in_test[i] = true;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!in_test[i]) f.train.push_back(i);
    folds.push_back(std::move(f));
  }
  return folds;
}

/// Leakage guard: throws if any index is shared.
inline void check_disjoint(const Indices& train, const Indices& test) {
  Indices a = train, b = test;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  Indices common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  require(common.empty(), ErrorCode::InvalidInput,
          "training indices overlap the held-out fold (" + std::to_string(common.size()) + " shared)");
}

}  // namespace eegbench::eval
