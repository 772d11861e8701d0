#pragma once

#include <json.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "eegbench/bench/bundle.hpp"
#include "eegbench/bench/config.hpp"
#include "eegbench/bench/csv.hpp"
#include "eegbench/bench/registry.hpp"
#include "eegbench/bench/report.hpp"
#include "eegbench/bench/stats_report.hpp"
#include "eegbench/eval/evaluate.hpp"
#include "eegbench/eval/from_synth.hpp"

namespace eegbench::bench {

struct LoadedDataset {
  eval::EvalDataset data;
  Paradigm paradigm;
};

/// Materializes one configured dataset. A bundle whose id is a registry
/// entry must agree with that entry's paradigm and channel count.
inline LoadedDataset load_dataset(const DatasetSource& src) {
  if (src.synth) return {eval::from_synth(synth::generate(*src.synth), src.id), src.synth->paradigm};
  Bundle b = load_bundle(*src.bundle);
  if (registry_contains(src.id)) {
    const auto& r = registry_lookup(src.id);
    require(r.paradigm == b.paradigm, ErrorCode::InvalidConfig,
            "bundle for " + r.id + " is " + std::string(to_string(b.paradigm)) + ", registry says " +
                std::string(to_string(r.paradigm)));
    require(std::size_t(r.n_channels) == b.channels.size(), ErrorCode::InvalidConfig,
            "bundle for " + r.id + " has " + std::to_string(b.channels.size()) + " channels, registry says " +
                std::to_string(r.n_channels));
  }
  b.dataset = src.id;
  return {to_eval_dataset(b), b.paradigm};
}

inline Json issues_json(const std::vector<eval::Issue>& issues) {
  Json out = Json::array();
  for (const auto& i : issues)
    out.push_back({{"dataset", i.dataset},
                   {"subject", i.subject},
                   {"session", i.session},
                   {"pipeline", i.pipeline},
                   {"fold", i.fold},
                   {"severity", i.severity},
                   {"code", i.code},
                   {"message", i.message}});
  return out;
}

/// Runs every paradigm group of the configuration. Pipelines only see
/// datasets of their own paradigm.
inline eval::EvalOutput run_evaluation(const BenchmarkConfig& c) {
  eval::EvalOutput out;
  std::map<Paradigm, std::vector<eval::EvalDataset>> groups;
  for (const auto& src : c.datasets) {
    try {
      auto d = load_dataset(src);
      groups[d.paradigm].push_back(std::move(d.data));
    } catch (const Error& e) {
      out.issues.push_back({src.id, 0, "", "", -1, "error", std::string(to_string(e.code())), e.what()});
    }
  }
  for (const auto& s : c.pipelines) {
    const auto par = pipelines::find_pipeline(s.name).paradigm;
    if (!groups.count(par))
      out.issues.push_back({"", 0, "", s.name, -1, "warning", "InvalidConfig",
                            "no loaded dataset of paradigm " + std::string(to_string(par))});
  }
  for (const auto& [par, datasets] : groups) {
    std::vector<eval::PipelineSpec> specs;
    for (const auto& s : c.pipelines)
      if (pipelines::find_pipeline(s.name).paradigm == par) specs.push_back(s);
    if (specs.empty()) {
      for (const auto& d : datasets)
        out.issues.push_back({d.id, 0, "", "", -1, "warning", "InvalidConfig",
                              "no configured pipeline of paradigm " + std::string(to_string(par))});
      continue;
    }
    auto part = eval::evaluate(datasets, specs, c.plan);
    out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
    out.issues.insert(out.issues.end(), part.issues.begin(), part.issues.end());
  }
  eval::sort_canonical(out);
  return out;
}

namespace detail {

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  require(bool(f), ErrorCode::InvalidInput, "failed writing " + p.string());
}

}  // namespace detail

/// Evaluates and writes results.csv, timings.csv, stats.json, summary.md and
/// errors.json into `c.output_dir`. In reproducible mode results.csv carries
/// zeros in the timing columns so reruns are byte-identical; measured values
/// are always in timings.csv.
inline eval::EvalOutput run_benchmark(const BenchmarkConfig& c, std::ostream* log = nullptr) {
  const auto out = run_evaluation(c);
  fs::create_directories(c.output_dir);
  detail::write_file(c.output_dir / "results.csv", results_csv(out.rows, !c.reproducible));
  detail::write_file(c.output_dir / "timings.csv", timings_csv(out.rows));
  detail::write_file(c.output_dir / "errors.json", issues_json(out.issues).dump(2) + "\n");
  detail::write_file(c.output_dir / "stats.json", all_comparisons(out.rows, c.plan.seed).dump(2) + "\n");
  std::string md = "# Benchmark summary\n\nStrategy: " + eval::to_string(c.plan.strategy) +
                   ". Seed: " + std::to_string(c.plan.seed) + ". Rows: " + std::to_string(out.rows.size()) +
                   ". Issues: " + std::to_string(out.issues.size()) + ".\n\n";
  md += out.rows.empty() ? std::string("No results.\n") : report_markdown(out.rows);
  detail::write_file(c.output_dir / "summary.md", md);
  if (log)
    *log << out.rows.size() << " result rows, " << out.issues.size() << " issues, written to "
         << c.output_dir.string() << '\n';
  return out;
}

}  // namespace eegbench::bench
