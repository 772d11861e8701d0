#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/eval/evaluate.hpp"
#include "eegbench/eval/metrics.hpp"

namespace eegbench::eval {

/// counts[p][r]: number of sessions where pipelines[p] took ranks[r].
struct RankTable {
  std::vector<std::string> pipelines;
  std::vector<double> ranks;  // distinct ranks seen, ascending (midranks may be fractional)
  std::vector<std::vector<int>> counts;
  int sessions = 0;
};

/// Ranks pipelines inside every (dataset, subject, session) by their mean
/// score over folds; rank 1 is best and ties share the midrank.
inline RankTable rank_pipelines(const std::vector<ResultRow>& rows) {
  using SessionKey = std::tuple<std::string, int, std::string>;
  std::map<SessionKey, std::map<std::string, std::pair<double, int>>> acc;
  std::set<std::string> names;
  for (const auto& r : rows) {
    auto& cell = acc[{r.dataset, r.subject, r.session}][r.pipeline];
    cell.first += r.score;
    ++cell.second;
    names.insert(r.pipeline);
  }
  RankTable t;
  t.pipelines.assign(names.begin(), names.end());
  std::map<std::string, std::map<double, int>> tally;
  for (const auto& [key, per] : acc) {
    std::vector<double> neg;
    for (const auto& p : t.pipelines) {
      const auto it = per.find(p);
      require(it != per.end(), ErrorCode::IncompleteGrid,
              "pipeline '" + p + "' has no score for " + std::get<0>(key) + " subject " +
                  std::to_string(std::get<1>(key)) + " session " + std::get<2>(key));
      neg.push_back(-it->second.first / it->second.second);
    }
    const auto r = midranks(neg);
    for (std::size_t i = 0; i < r.size(); ++i) ++tally[t.pipelines[i]][r[i]];
    ++t.sessions;
  }
  std::set<double> ranks;
  for (const auto& [p, m] : tally)
    for (const auto& [r, c] : m) ranks.insert(r);
  t.ranks.assign(ranks.begin(), ranks.end());
  for (const auto& p : t.pipelines) {
    std::vector<int> row;
    for (double r : t.ranks) {
      const auto& m = tally[p];
      const auto it = m.find(r);
      row.push_back(it == m.end() ? 0 : it->second);
    }
    t.counts.push_back(std::move(row));
  }
  return t;
}

}  // namespace eegbench::eval
