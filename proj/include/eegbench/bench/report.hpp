#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eegbench/bench/csv.hpp"
#include "eegbench/eval/evaluate.hpp"
#include "eegbench/eval/rank.hpp"

namespace eegbench::bench {

struct Cell {
  double mean = 0;
  double std = 0;
};

/// Pipelines × datasets. Values are in display units after `scale`.
struct SummaryTable {
  std::vector<std::string> pipelines;  // ASCII order
  std::vector<std::string> datasets;   // ASCII order
  std::map<std::pair<std::string, std::string>, Cell> cells;
  double scale = 100;  // results are fractions; shown as percentages

  std::optional<Cell> at(const std::string& pipeline, const std::string& dataset) const {
    const auto it = cells.find({pipeline, dataset});
    if (it == cells.end()) return std::nullopt;
    return it->second;
  }

  /// Mean over datasets of the pipeline's means; empty if one is missing.
  std::optional<double> pipeline_average(const std::string& p) const {
    double s = 0;
    for (const auto& d : datasets) {
      const auto c = at(p, d);
      if (!c) return std::nullopt;
      s += c->mean;
    }
    return datasets.empty() ? std::nullopt : std::optional<double>(s / double(datasets.size()));
  }

  std::optional<double> dataset_average(const std::string& d) const {
    double s = 0;
    int n = 0;
    for (const auto& p : pipelines)
      if (const auto c = at(p, d)) {
        s += c->mean;
        ++n;
      }
    return n ? std::optional<double>(s / n) : std::nullopt;
  }
};

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = 0;
  for (double x : v) m += x;
  m /= double(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1));
}

/// Per-subject scores of every (dataset, pipeline): folds and sessions are
/// averaged within a subject first.
inline std::map<std::pair<std::string, std::string>, std::map<int, double>> subject_scores(
    const std::vector<eval::ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, int, std::string>, std::pair<double, int>> per_session;
  for (const auto& r : rows) {
    auto& a = per_session[{r.dataset, r.pipeline, r.subject, r.session}];
    a.first += r.score;
    ++a.second;
  }
  std::map<std::tuple<std::string, std::string, int>, std::pair<double, int>> per_subject;
  for (const auto& [k, a] : per_session) {
    auto& s = per_subject[{std::get<0>(k), std::get<1>(k), std::get<2>(k)}];
    s.first += a.first / a.second;
    ++s.second;
  }
  std::map<std::pair<std::string, std::string>, std::map<int, double>> out;
  for (const auto& [k, s] : per_subject) out[{std::get<0>(k), std::get<1>(k)}][std::get<2>(k)] = s.first / s.second;
  return out;
}

/// Mean ± sample std over subjects, per dataset and pipeline.
inline SummaryTable summarize(const std::vector<eval::ResultRow>& rows) {
  SummaryTable t;
  std::set<std::string> p, d;
  for (const auto& [key, subjects] : subject_scores(rows)) {
    std::vector<double> v;
    for (const auto& [s, score] : subjects) v.push_back(score);
    double m = 0;
    for (double x : v) m += x;
    t.cells[{key.second, key.first}] = {m / double(v.size()), sample_std(v)};
    d.insert(key.first);
    p.insert(key.second);
  }
  t.pipelines.assign(p.begin(), p.end());
  t.datasets.assign(d.begin(), d.end());
  return t;
}

/// Reference fixture: CSV with pipeline,dataset,mean,std already in percent.
/// Rows whose pipeline or dataset is "Average" are the printed averages and
/// are not part of the table; they are returned separately.
struct ReferenceTable {
  SummaryTable table;
  std::map<std::string, double> pipeline_averages;
  std::map<std::string, double> dataset_averages;
};

inline ReferenceTable load_reference(const std::string& path) {
  const auto records = parse_csv(read_text(path));
  require(records.size() > 1 && records[0].size() == 4, ErrorCode::InvalidInput, path + ": not a reference table");
  ReferenceTable r;
  r.table.scale = 1;
  std::set<std::string> p, d;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    require(f.size() == 4, ErrorCode::InvalidInput, path + ": bad line " + std::to_string(i + 1));
    if (f[1] == "Average") {
      r.pipeline_averages[f[0]] = parse_number(f[2]);
    } else if (f[0] == "Average") {
      r.dataset_averages[f[1]] = parse_number(f[2]);
    } else {
      r.table.cells[{f[0], f[1]}] = {parse_number(f[2]), parse_number(f[3])};
      p.insert(f[0]);
      d.insert(f[1]);
    }
  }
  r.table.pipelines.assign(p.begin(), p.end());
  r.table.datasets.assign(d.begin(), d.end());
  return r;
}

namespace detail {

inline std::string bold_if(const std::string& s, bool b) { return b ? "**" + s + "**" : s; }

// Columns' maxima, compared on the displayed (rounded) values so that a
// visual tie is bolded consistently.
inline double shown(double v, double scale) { return std::round(v * scale * 100) / 100; }

}  // namespace detail

/// Markdown in the layout of the published summary tables: pipelines as rows,
/// datasets as columns, "mean±std" cells, the best of each column in bold,
/// an Average column and an Average row.
inline std::string render_markdown(const SummaryTable& t) {
  const double k = t.scale;
  std::map<std::string, double> best;
  for (const auto& d : t.datasets)
    for (const auto& p : t.pipelines)
      if (const auto c = t.at(p, d)) best[d] = std::max(best.count(d) ? best[d] : -1e300, detail::shown(c->mean, k));
  std::optional<double> best_avg;
  for (const auto& p : t.pipelines)
    if (const auto a = t.pipeline_average(p)) best_avg = std::max(best_avg.value_or(-1e300), detail::shown(*a, k));

  std::string out = "| pipeline |";
  for (const auto& d : t.datasets) out += " " + d + " |";
  out += " Average |\n|---|";
  for (std::size_t i = 0; i < t.datasets.size(); ++i) out += "---|";
  out += "---|\n";
  for (const auto& p : t.pipelines) {
    out += "| " + p + " |";
    for (const auto& d : t.datasets) {
      const auto c = t.at(p, d);
      if (!c) {
        out += " - |";
        continue;
      }
      const std::string cell = format_fixed(c->mean * k, 2) + "±" + format_fixed(c->std * k, 2);
      out += " " + detail::bold_if(cell, detail::shown(c->mean, k) == best[d]) + " |";
    }
    const auto a = t.pipeline_average(p);
    out += " " + (a ? detail::bold_if(format_fixed(*a * k, 2), detail::shown(*a, k) == *best_avg) : "-") + " |\n";
  }
  out += "| Average |";
  double overall = 0;
  int n = 0;
  for (const auto& d : t.datasets) {
    const auto a = t.dataset_average(d);
    out += " " + (a ? format_fixed(*a * k, 2) : "-") + " |";
    if (a) {
      overall += *a;
      ++n;
    }
  }
  out += " " + (n ? format_fixed(overall / n * k, 2) : "-") + " |\n";
  return out;
}

inline std::string render_summary_csv(const SummaryTable& t) {
  std::string out = "pipeline,dataset,mean,std\n";
  for (const auto& p : t.pipelines) {
    for (const auto& d : t.datasets)
      if (const auto c = t.at(p, d))
        out += csv_field(p) + ',' + csv_field(d) + ',' + format_fixed(c->mean * t.scale, 2) + ',' +
               format_fixed(c->std * t.scale, 2) + '\n';
    if (const auto a = t.pipeline_average(p)) out += csv_field(p) + ",Average," + format_fixed(*a * t.scale, 2) + ",\n";
  }
  for (const auto& d : t.datasets)
    if (const auto a = t.dataset_average(d)) out += "Average," + csv_field(d) + ',' + format_fixed(*a * t.scale, 2) + ",\n";
  return out;
}

inline std::string rank_label(double r) {
  return r == std::floor(r) ? std::to_string(int(r)) : format_fixed(r, 1);
}

/// Counts of sessions per (pipeline, rank), one column per rank.
inline std::string render_rank_markdown(const eval::RankTable& t) {
  std::string out = "| pipeline |";
  for (double r : t.ranks) out += " rank " + rank_label(r) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < t.ranks.size(); ++i) out += "---|";
  out += "\n";
  for (std::size_t p = 0; p < t.pipelines.size(); ++p) {
    out += "| " + t.pipelines[p] + " |";
    for (int c : t.counts[p]) out += " " + std::to_string(c) + " |";
    out += "\n";
  }
  return out;
}

inline std::string render_rank_csv(const eval::RankTable& t) {
  std::string out = "pipeline,rank,sessions\n";
  for (std::size_t p = 0; p < t.pipelines.size(); ++p)
    for (std::size_t r = 0; r < t.ranks.size(); ++r)
      out += csv_field(t.pipelines[p]) + ',' + rank_label(t.ranks[r]) + ',' + std::to_string(t.counts[p][r]) + '\n';
  return out;
}

/// Splits rows into groups of datasets evaluated with identical pipeline
/// sets, so each group can be ranked without gaps.
inline std::vector<std::vector<eval::ResultRow>> comparable_groups(const std::vector<eval::ResultRow>& rows) {
  std::map<std::string, std::set<std::string>> per_dataset;
  for (const auto& r : rows) per_dataset[r.dataset].insert(r.pipeline);
  std::map<std::set<std::string>, std::set<std::string>> groups;  // pipeline set → datasets
  for (const auto& [d, ps] : per_dataset) groups[ps].insert(d);
  std::vector<std::vector<eval::ResultRow>> out;
  for (const auto& [ps, ds] : groups) {
    std::vector<eval::ResultRow> g;
    for (const auto& r : rows)
      if (ds.count(r.dataset)) g.push_back(r);
    out.push_back(std::move(g));
  }
  return out;
}

/// Summary tables and rank histograms for every comparable group.
inline std::string report_markdown(const std::vector<eval::ResultRow>& rows) {
  std::string out;
  const auto groups = comparable_groups(rows);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto t = summarize(groups[g]);
    std::set<std::string> metrics;
    for (const auto& r : groups[g]) metrics.insert(r.metric);
    std::string m;
    for (const auto& x : metrics) m += (m.empty() ? "" : ", ") + x;
    if (groups.size() > 1) out += "## Group " + std::to_string(g + 1) + "\n\n";
    out += "Within-dataset mean ± std over subjects (" + m + ", ×100).\n\n" + render_markdown(t) + "\n";
    try {
      const auto ranks = eval::rank_pipelines(groups[g]);
      out += "Pipeline ranks per session (" + std::to_string(ranks.sessions) + " sessions).\n\n" +
             render_rank_markdown(ranks) + "\n";
    } catch (const Error& e) {
      out += "Ranks unavailable: " + std::string(e.what()) + "\n\n";
    }
  }
  return out;
}

inline std::string report_csv(const std::vector<eval::ResultRow>& rows) {
  std::string out;
  for (const auto& g : comparable_groups(rows)) {
    const std::string part = render_summary_csv(summarize(g));
    out += out.empty() ? part : part.substr(part.find('\n') + 1);
  }
  return out;
}

}  // namespace eegbench::bench
