#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/random.hpp"
#include "eegbench/dsp/epochs.hpp"
#include "eegbench/eval/grid_search.hpp"
#include "eegbench/eval/meter.hpp"
#include "eegbench/eval/pool.hpp"
#include "eegbench/eval/split.hpp"
#include "eegbench/pipelines/catalog.hpp"

namespace eegbench::eval {

enum class Strategy { WithinSession, CrossSession, CrossSubject };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::WithinSession: return "within_session";
    case Strategy::CrossSession: return "cross_session";
    case Strategy::CrossSubject: return "cross_subject";
  }
  return "";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "within_session") return Strategy::WithinSession;
  if (s == "cross_session") return Strategy::CrossSession;
  if (s == "cross_subject") return Strategy::CrossSubject;
  fail(ErrorCode::InvalidConfig, "unknown strategy '" + std::string(s) + "'");
}

struct SessionEpochs {
  int subject = 0;
  std::string session;
  dsp::Epochs epochs;
};

struct EvalDataset {
  std::string id;
  std::vector<SessionEpochs> sessions;
};

/// A catalog pipeline with an optional grid. No grid means the default grid
/// for that pipeline; an empty grid means catalog defaults without search.
struct PipelineSpec {
  std::string name;
  std::optional<pipelines::Grid> grid;
};

struct EvaluationPlan {
  Strategy strategy = Strategy::WithinSession;
  int outer_folds = 5;
  int inner_folds = 3;
  std::uint64_t seed = 0;
  std::optional<Metric> metric;  // unset: ROC-AUC for two classes, accuracy otherwise
  bool grid_search = true;
  int jobs = 1;
  MeterConfig meter;
};

struct ResultRow {
  std::string dataset;
  int subject = 0;
  std::string session;  // "all" for cross-subject rows
  std::string pipeline;
  int fold = 0;         // outer fold, or index of the held-out unit
  std::string metric;
  double score = 0;
  std::size_t n_train = 0, n_test = 0;
  double fit_time_s = 0, predict_time_s = 0;
  double energy_wh = 0, co2_g = 0;
};

/// Skipped or failed work, recorded instead of aborting the run.
struct Issue {
  std::string dataset;
  int subject = 0;
  std::string session;
  std::string pipeline;  // empty when the whole session was skipped
  int fold = -1;
  std::string severity;  // "warning" (skipped) or "error" (failed)
  std::string code;
  std::string message;
};

struct EvalOutput {
  std::vector<ResultRow> rows;
  std::vector<Issue> issues;
};

inline auto row_key(const ResultRow& r) { return std::tie(r.dataset, r.subject, r.session, r.pipeline, r.fold); }

inline void sort_canonical(EvalOutput& out) {
  std::sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
  std::sort(out.issues.begin(), out.issues.end(), [](const Issue& a, const Issue& b) {
    return std::tie(a.dataset, a.subject, a.session, a.pipeline, a.fold, a.code, a.message) <
           std::tie(b.dataset, b.subject, b.session, b.pipeline, b.fold, b.code, b.message);
  });
}

/// Stacks trials of several sessions into one training set.
inline dsp::Epochs concat(const std::vector<const dsp::Epochs*>& parts) {
  require(!parts.empty(), ErrorCode::EmptyEpochs, "nothing to concatenate");
  dsp::Epochs out{{}, {}, parts.front()->sfreq, parts.front()->tmin, parts.front()->class_names};
  for (const auto* p : parts) {
    require(p->sfreq == out.sfreq, ErrorCode::DimensionMismatch, "sessions differ in sampling rate");
    if (out.class_names.size() < p->class_names.size()) out.class_names = p->class_names;
    out.data.insert(out.data.end(), p->data.begin(), p->data.end());
    out.labels.insert(out.labels.end(), p->labels.begin(), p->labels.end());
  }
  out.validate();
  return out;
}

inline Metric resolve_metric(const EvalDataset& d, const std::optional<Metric>& requested) {
  std::set<int> classes;
  for (const auto& s : d.sessions) classes.insert(s.epochs.labels.begin(), s.epochs.labels.end());
  if (!requested) return classes.size() == 2 ? Metric::RocAuc : Metric::Accuracy;
  require(*requested != Metric::RocAuc || classes.size() == 2, ErrorCode::InvalidConfig,
          "dataset '" + d.id + "' has " + std::to_string(classes.size()) + " classes; ROC-AUC is binary only");
  return *requested;
}

namespace detail {

struct TrainTest {
  dsp::Epochs train, test;
};

/// Fits (with optional inner search) on `train`, scores on `test`, meters both.
inline ResultRow run_split(const std::string& dataset, int subject, const std::string& session,
                           const PipelineSpec& spec, int fold, const TrainTest& tt, Metric metric,
                           const EvaluationPlan& plan) {
  const std::uint64_t seed = derive_seed(plan.seed, dataset, subject, session, spec.name, fold);
  pipelines::Grid grid;
  if (plan.grid_search) grid = spec.grid ? *spec.grid : pipelines::default_grid(spec.name, tt.train.channels());
  std::unique_ptr<pipelines::Model> model;
  const Measurement fit_m = meter(plan.meter, [&] {
    pipelines::Hyper hyper;
    if (!grid.empty())
      hyper = nested_grid_search(spec.name, tt.train, grid, plan.inner_folds, derive_seed(seed, "inner"), metric).best;
    model = pipelines::fit(spec.name, tt.train, hyper, seed);
  });
  double score = 0;
  const Measurement pred_m = meter(plan.meter, [&] { score = score_model(*model, tt.test, metric); });
  ResultRow r;
  r.dataset = dataset;
  r.subject = subject;
  r.session = session;
  r.pipeline = spec.name;
  r.fold = fold;
  r.metric = to_string(metric);
  r.score = score;
  r.n_train = tt.train.size();
  r.n_test = tt.test.size();
  r.fit_time_s = fit_m.wall_s;
  r.predict_time_s = pred_m.wall_s;
  r.energy_wh = fit_m.energy_wh + pred_m.energy_wh;
  r.co2_g = fit_m.co2_g + pred_m.co2_g;
  return r;
}

inline Issue issue(const std::string& dataset, int subject, const std::string& session, const std::string& pipeline,
                   int fold, const char* severity, const Error& e) {
  const std::string what = e.what();
  const std::string code(to_string(e.code()));
  const std::string msg = what.rfind(code + ": ", 0) == 0 ? what.substr(code.size() + 2) : what;
  return {dataset, subject, session, pipeline, fold, severity, code, msg};
}

/// One schedulable unit: a list of splits for one pipeline, built lazily.
struct Unit {
  std::string dataset;
  int subject = 0;
  std::string session;
  const PipelineSpec* spec = nullptr;
  Metric metric = Metric::RocAuc;
  std::function<std::vector<std::tuple<int, std::string, TrainTest>>()> splits;  // (fold, session, data)
};

}  // namespace detail

/// Runs `plan` over every dataset and pipeline. Work units are independent
/// and seeded from their identity, so the sorted output does not depend on
/// `plan.jobs`.
inline EvalOutput evaluate(const std::vector<EvalDataset>& datasets, const std::vector<PipelineSpec>& specs,
                           const EvaluationPlan& plan) {
  plan.meter.validate();
  require(plan.outer_folds >= 2 && plan.inner_folds >= 2, ErrorCode::InvalidConfig, "need at least two folds");
  for (const auto& s : specs) pipelines::find_pipeline(s.name);

  EvalOutput out;
  std::vector<detail::Unit> units;
  for (const auto& d : datasets) {
    Metric metric;
    try {
      metric = resolve_metric(d, plan.metric);
    } catch (const Error& e) {
      out.issues.push_back(detail::issue(d.id, 0, "", "", -1, "error", e));
      continue;
    }
    switch (plan.strategy) {
      case Strategy::WithinSession:
        for (const auto& s : d.sessions) {
          std::vector<Fold> folds;
          try {
            require(s.epochs.classes().size() >= 2, ErrorCode::DegenerateLabels, "session has a single class");
            folds = stratified_kfold(s.epochs.labels, plan.outer_folds,
                                     derive_seed(plan.seed, "folds", d.id, s.subject, s.session));
          } catch (const Error& e) {
            out.issues.push_back(detail::issue(d.id, s.subject, s.session, "", -1, "warning", e));
            continue;
          }
          for (const auto& spec : specs)
            units.push_back({d.id, s.subject, s.session, &spec, metric, [&s, folds] {
                               std::vector<std::tuple<int, std::string, detail::TrainTest>> v;
                               for (std::size_t f = 0; f < folds.size(); ++f) {
                                 check_disjoint(folds[f].train, folds[f].test);
                                 v.emplace_back(int(f), s.session,
                                                detail::TrainTest{s.epochs.subset(folds[f].train),
                                                                  s.epochs.subset(folds[f].test)});
                               }
                               return v;
                             }});
        }
        break;
      case Strategy::CrossSession: {
        std::map<int, std::vector<const SessionEpochs*>> by_subject;
        for (const auto& s : d.sessions) by_subject[s.subject].push_back(&s);
        for (const auto& [subject, sessions] : by_subject) {
          if (sessions.size() < 2) {
            out.issues.push_back(detail::issue(d.id, subject, "", "", -1, "warning",
                                               Error(ErrorCode::InsufficientUnits, "subject has a single session")));
            continue;
          }
          for (const auto& spec : specs)
            units.push_back({d.id, subject, "", &spec, metric, [sessions] {
                               std::vector<std::tuple<int, std::string, detail::TrainTest>> v;
                               for (std::size_t h = 0; h < sessions.size(); ++h) {
                                 std::vector<const dsp::Epochs*> rest;
                                 for (std::size_t j = 0; j < sessions.size(); ++j)
                                   if (j != h) rest.push_back(&sessions[j]->epochs);
                                 v.emplace_back(int(h), sessions[h]->session,
                                                detail::TrainTest{concat(rest), sessions[h]->epochs});
                               }
                               return v;
                             }});
        }
        break;
      }
      case Strategy::CrossSubject: {
        std::map<int, std::vector<const dsp::Epochs*>> by_subject;
        for (const auto& s : d.sessions) by_subject[s.subject].push_back(&s.epochs);
        if (by_subject.size() < 2) {
          out.issues.push_back(detail::issue(d.id, 0, "", "", -1, "error",
                                             Error(ErrorCode::InsufficientUnits, "dataset has a single subject")));
          continue;
        }
        int h = 0;
        for (const auto& [subject, held] : by_subject) {
          std::vector<const dsp::Epochs*> rest;
          for (const auto& [other, eps] : by_subject)
            if (other != subject) rest.insert(rest.end(), eps.begin(), eps.end());
          for (const auto& spec : specs)
            units.push_back({d.id, subject, "all", &spec, metric, [held = held, rest, h] {
                               std::vector<std::tuple<int, std::string, detail::TrainTest>> v;
                               v.emplace_back(h, "all", detail::TrainTest{concat(rest), concat(held)});
                               return v;
                             }});
          ++h;
        }
        break;
      }
    }
  }

  std::mutex merge;
  parallel_for(units.size(), plan.jobs, [&](std::size_t i) {
    const auto& u = units[i];
    std::vector<ResultRow> rows;
    std::vector<Issue> issues;
    try {
      for (const auto& [fold, session, tt] : u.splits()) {
        try {
          rows.push_back(detail::run_split(u.dataset, u.subject, session, *u.spec, fold, tt, u.metric, plan));
        } catch (const Error& e) {
          issues.push_back(detail::issue(u.dataset, u.subject, session, u.spec->name, fold, "error", e));
        }
      }
    } catch (const Error& e) {
      issues.push_back(detail::issue(u.dataset, u.subject, u.session, u.spec->name, -1, "error", e));
    }
    std::lock_guard lock(merge);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    out.issues.insert(out.issues.end(), issues.begin(), issues.end());
  });
  sort_canonical(out);
  return out;
}

inline EvalOutput within_session_evaluate(const std::vector<EvalDataset>& d, const std::vector<PipelineSpec>& p,
                                          EvaluationPlan plan) {
  plan.strategy = Strategy::WithinSession;
  return evaluate(d, p, plan);
}

/// Throws InsufficientUnits when no subject has two sessions.
inline EvalOutput cross_session_evaluate(const std::vector<EvalDataset>& d, const std::vector<PipelineSpec>& p,
                                         EvaluationPlan plan) {
  plan.strategy = Strategy::CrossSession;
  for (const auto& ds : d) {
    std::map<int, int> count;
    for (const auto& s : ds.sessions) ++count[s.subject];
    require(std::any_of(count.begin(), count.end(), [](const auto& kv) { return kv.second >= 2; }),
            ErrorCode::InsufficientUnits, "dataset '" + ds.id + "' has no subject with two sessions");
  }
  return evaluate(d, p, plan);
}

/// Throws InsufficientUnits when a dataset has a single subject.
inline EvalOutput cross_subject_evaluate(const std::vector<EvalDataset>& d, const std::vector<PipelineSpec>& p,
                                         EvaluationPlan plan) {
  plan.strategy = Strategy::CrossSubject;
  for (const auto& ds : d) {
    std::set<int> subjects;
    for (const auto& s : ds.sessions) subjects.insert(s.subject);
    require(subjects.size() >= 2, ErrorCode::InsufficientUnits, "dataset '" + ds.id + "' has a single subject");
  }
  return evaluate(d, p, plan);
}

}  // namespace eegbench::eval
