#pragma once

#include <json.hpp>

#include <set>
#include <string>
#include <vector>

#include "eegbench/bench/report.hpp"
#include "eegbench/core/random.hpp"
#include "eegbench/stats/paired.hpp"
#include "eegbench/stats/stouffer.hpp"

namespace eegbench::bench {

using Json = nlohmann::ordered_json;

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// Per-dataset paired comparison of subject-mean scores (A better than B is
/// the one-tailed direction) and the Stouffer combination across datasets.
/// Datasets with fewer than two shared subjects are listed as skipped.
inline Json compare_results(const std::vector<eval::ResultRow>& rows, const std::string& a, const std::string& b,
                            std::uint64_t seed = 0) {
  std::set<std::string> names;
  for (const auto& r : rows) names.insert(r.pipeline);
  for (const auto& p : {a, b})
    require(names.count(p) > 0, ErrorCode::NotFound, "pipeline '" + p + "' not in results");

  const auto scores = subject_scores(rows);
  std::set<std::string> datasets;
  for (const auto& [key, s] : scores) datasets.insert(key.first);

  Json out;
  out["pipeline_a"] = a;
  out["pipeline_b"] = b;
  out["alternative"] = "greater";
  out["datasets"] = Json::array();
  out["skipped"] = Json::array();
  std::vector<stats::DatasetStat> per;
  for (const auto& d : datasets) {
    const auto ia = scores.find({d, a}), ib = scores.find({d, b});
    std::vector<double> va, vb;
    if (ia != scores.end() && ib != scores.end())
      for (const auto& [subject, s] : ia->second)
        if (const auto jt = ib->second.find(subject); jt != ib->second.end()) {
          va.push_back(s);
          vb.push_back(jt->second);
        }
    if (va.size() < 2) {
      out["skipped"].push_back({{"dataset", d}, {"reason", std::to_string(va.size()) + " subject(s) with both pipelines"}});
      continue;
    }
    stats::PermutationOptions opt;
    opt.seed = derive_seed(seed, "stats", d, a, b);
    const auto st = stats::compare_pipelines(d, va, vb, opt);
    per.push_back(st);
    out["datasets"].push_back({{"dataset", d},
                               {"n_subjects", st.n_subjects},
                               {"method", stats::to_string(st.method)},
                               {"p_value", st.p_value},
                               {"smd", optional_number(st.smd)}});
  }
  if (per.empty()) {
    out["combined"] = nullptr;
    return out;
  }
  const auto c = stats::stouffer_combine(per);
  Json weights;
  for (std::size_t i = 0; i < per.size(); ++i) weights[per[i].dataset_id] = c.weights[i];
  out["combined"] = {{"z", c.z},
                     {"p_value", c.p_value},
                     {"smd", optional_number(c.combined_smd)},
                     {"weights", weights},
                     {"clamped", c.clamped}};
  return out;
}

/// Every ordered pipeline pair within each comparable group.
inline Json all_comparisons(const std::vector<eval::ResultRow>& rows, std::uint64_t seed) {
  Json out = Json::array();
  for (const auto& g : comparable_groups(rows)) {
    std::set<std::string> names;
    for (const auto& r : g) names.insert(r.pipeline);
    for (const auto& a : names)
      for (const auto& b : names)
        if (a != b) out.push_back(compare_results(g, a, b, seed));
  }
  return out;
}

}  // namespace eegbench::bench
