#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eegbench/bench/bundle.hpp"
#include "eegbench/bench/registry.hpp"
#include "eegbench/eval/evaluate.hpp"
#include "eegbench/pipelines/catalog.hpp"
#include "eegbench/synth/synthgen.hpp"

namespace eegbench::bench {

inline constexpr const char* kCarbonEnv = "BENCH_CARBON_INTENSITY_G_PER_KWH";

/// Generic grid average used when neither the config nor the environment
/// sets a carbon intensity.
inline constexpr double kDefaultCarbonIntensity = 475.0;

/// A dataset comes either from the generator or from an epoch bundle.
struct DatasetSource {
  std::string id;
  std::optional<synth::SynthSpec> synth;
  std::optional<fs::path> bundle;
};

struct BenchmarkConfig {
  std::vector<DatasetSource> datasets;
  std::vector<eval::PipelineSpec> pipelines;
  eval::EvaluationPlan plan;
  fs::path output_dir = "bench_out";
  bool reproducible = true;  // timing columns go to timings.csv, not results.csv
};

namespace detail {

inline void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  require(obj.is_object(), ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [k, v] : obj.items())
    require(allowed.count(k) > 0, ErrorCode::InvalidConfig, "unknown key '" + k + "' in " + where);
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "' in " + where);
  }
}

inline double env_carbon_intensity() {
  const char* v = std::getenv(kCarbonEnv);
  if (!v || !*v) return kDefaultCarbonIntensity;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  require(end != v && *end == '\0' && x >= 0, ErrorCode::InvalidConfig,
          std::string(kCarbonEnv) + " must be a non-negative number");
  return x;
}

}  // namespace detail

inline synth::SynthSpec parse_synth_spec(const Json& j, std::uint64_t default_seed,
                                         std::optional<Paradigm> paradigm = std::nullopt) {
  const std::string where = "synth spec";
  detail::check_keys(j,
                     {"paradigm", "n_subjects", "n_sessions", "n_channels", "n_trials_per_class", "n_classes",
                      "sfreq", "trial_len_s", "snr", "subject_shift", "seed", "sources_per_class", "freqs",
                      "shuffle_labels"},
                     where);
  synth::SynthSpec s;
  if (j.contains("paradigm")) s.paradigm = parse_paradigm(detail::get_or<std::string>(j, "paradigm", "", where));
  if (paradigm) {
    require(!j.contains("paradigm") || s.paradigm == *paradigm, ErrorCode::InvalidConfig,
            "spec paradigm disagrees with --paradigm");
    s.paradigm = *paradigm;
  }
  require(j.contains("paradigm") || paradigm, ErrorCode::InvalidConfig, "synth spec needs a paradigm");
  s.n_subjects = detail::get_or(j, "n_subjects", s.n_subjects, where);
  s.n_sessions = detail::get_or(j, "n_sessions", s.n_sessions, where);
  s.n_channels = detail::get_or(j, "n_channels", s.n_channels, where);
  s.n_trials_per_class = detail::get_or(j, "n_trials_per_class", s.n_trials_per_class, where);
  s.n_classes = detail::get_or(j, "n_classes", s.paradigm == Paradigm::SSVEP ? 3 : s.n_classes, where);
  s.sfreq = detail::get_or(j, "sfreq", s.sfreq, where);
  s.trial_len_s = detail::get_or(j, "trial_len_s", s.trial_len_s, where);
  s.snr = detail::get_or(j, "snr", s.snr, where);
  s.subject_shift = detail::get_or(j, "subject_shift", s.subject_shift, where);
  s.seed = detail::get_or<std::uint64_t>(j, "seed", default_seed, where);
  s.sources_per_class = detail::get_or(j, "sources_per_class", s.sources_per_class, where);
  s.freqs = detail::get_or(j, "freqs", s.freqs, where);
  s.shuffle_labels = detail::get_or(j, "shuffle_labels", s.shuffle_labels, where);
  s.validate();
  return s;
}

inline pipelines::Grid parse_grid(const Json& j, const std::string& pipeline) {
  require(j.is_object(), ErrorCode::InvalidConfig, "grid of '" + pipeline + "' must be an object");
  pipelines::Grid g;
  for (const auto& [key, values] : j.items()) {
    std::vector<double> v;
    try {
      v = values.is_array() ? values.get<std::vector<double>>() : std::vector<double>{values.get<double>()};
    } catch (const Json::exception&) {
      fail(ErrorCode::InvalidConfig, "grid '" + key + "' of '" + pipeline + "' must hold numbers");
    }
    require(!v.empty(), ErrorCode::InvalidConfig, "grid '" + key + "' of '" + pipeline + "' is empty");
    g.emplace_back(key, v);
  }
  return g;
}

/// Parses the benchmark document. Relative bundle paths resolve against
/// `base_dir` (the config file's directory).
inline BenchmarkConfig parse_config(const Json& j, const fs::path& base_dir = ".") {
  const std::string where = "config";
  detail::check_keys(j,
                     {"datasets", "pipelines", "strategy", "outer_folds", "inner_folds", "metric", "grid_search",
                      "seed", "jobs", "meter", "output_dir", "reproducible"},
                     where);
  BenchmarkConfig c;
  auto& p = c.plan;
  p.seed = detail::get_or<std::uint64_t>(j, "seed", 0, where);
  p.jobs = detail::get_or(j, "jobs", 1, where);
  require(p.jobs >= 1, ErrorCode::InvalidConfig, "jobs must be >= 1");
  p.strategy = eval::parse_strategy(detail::get_or<std::string>(j, "strategy", "within_session", where));
  p.outer_folds = detail::get_or(j, "outer_folds", 5, where);
  p.inner_folds = detail::get_or(j, "inner_folds", 3, where);
  const auto metric = detail::get_or<std::string>(j, "metric", "auto", where);
  if (metric != "auto") p.metric = eval::parse_metric(metric);
  p.grid_search = detail::get_or(j, "grid_search", true, where);
  p.meter.carbon_intensity_g_per_kwh = detail::env_carbon_intensity();
  if (j.contains("meter")) {
    const auto& m = j.at("meter");
    detail::check_keys(m, {"cpu_power_w", "carbon_intensity_g_per_kwh"}, "meter");
    p.meter.cpu_power_w = detail::get_or(m, "cpu_power_w", p.meter.cpu_power_w, "meter");
    p.meter.carbon_intensity_g_per_kwh =
        detail::get_or(m, "carbon_intensity_g_per_kwh", p.meter.carbon_intensity_g_per_kwh, "meter");
  }
  p.meter.validate();
  c.output_dir = detail::get_or<std::string>(j, "output_dir", c.output_dir.string(), where);
  c.reproducible = detail::get_or(j, "reproducible", true, where);

  require(j.contains("datasets") && j.at("datasets").is_array() && !j.at("datasets").empty(),
          ErrorCode::InvalidConfig, "config needs a non-empty 'datasets' array");
  std::set<std::string> ids;
  for (const auto& d : j.at("datasets")) {
    DatasetSource src;
    if (d.is_string()) {
      src.id = d.get<std::string>();
      fail(ErrorCode::InvalidConfig, "dataset '" + src.id +
                                         "' has no local data; give {\"id\": ..., \"bundle\": path} or a synth spec");
    }
    detail::check_keys(d, {"id", "synth", "bundle"}, "dataset entry");
    src.id = detail::get_or<std::string>(d, "id", "", "dataset entry");
    require(!src.id.empty(), ErrorCode::InvalidConfig, "dataset entry needs an 'id'");
    require(ids.insert(src.id).second, ErrorCode::InvalidConfig, "duplicate dataset id '" + src.id + "'");
    require(d.contains("synth") != d.contains("bundle"), ErrorCode::InvalidConfig,
            "dataset '" + src.id + "' needs exactly one of 'synth' or 'bundle'");
    if (d.contains("synth")) src.synth = parse_synth_spec(d.at("synth"), derive_seed(p.seed, "synth", src.id));
    if (d.contains("bundle")) {
      fs::path path = detail::get_or<std::string>(d, "bundle", "", "dataset entry");
      src.bundle = path.is_absolute() ? path : base_dir / path;
    }
    c.datasets.push_back(std::move(src));
  }

  require(j.contains("pipelines") && j.at("pipelines").is_array() && !j.at("pipelines").empty(),
          ErrorCode::InvalidConfig, "config needs a non-empty 'pipelines' array");
  std::set<std::string> names;
  for (const auto& e : j.at("pipelines")) {
    eval::PipelineSpec spec;
    if (e.is_string()) {
      spec.name = e.get<std::string>();
    } else {
      detail::check_keys(e, {"name", "grid"}, "pipeline entry");
      spec.name = detail::get_or<std::string>(e, "name", "", "pipeline entry");
      if (e.contains("grid")) spec.grid = parse_grid(e.at("grid"), spec.name);
    }
    const auto& entry = pipelines::find_pipeline(spec.name);
    spec.name = entry.name;  // canonical spelling
    if (spec.grid)
      for (const auto& [key, values] : *spec.grid)
        require(std::find(entry.keys.begin(), entry.keys.end(), key) != entry.keys.end(), ErrorCode::InvalidConfig,
                "pipeline '" + spec.name + "' has no hyperparameter '" + key + "'");
    require(names.insert(spec.name).second, ErrorCode::InvalidConfig, "duplicate pipeline '" + spec.name + "'");
    c.pipelines.push_back(std::move(spec));
  }

  // Every pipeline must apply to at least one synthetic dataset's paradigm,
  // unless bundles (paradigm known only after loading) are present.
  const bool has_bundle = std::any_of(c.datasets.begin(), c.datasets.end(), [](const auto& d) { return d.bundle; });
  if (!has_bundle)
    for (const auto& s : c.pipelines) {
      const auto par = pipelines::find_pipeline(s.name).paradigm;
      require(std::any_of(c.datasets.begin(), c.datasets.end(), [&](const auto& d) { return d.synth->paradigm == par; }),
              ErrorCode::InvalidConfig, "pipeline '" + s.name + "' (" + std::string(to_string(par)) +
                                            ") matches no dataset paradigm");
    }
  return c;
}

inline BenchmarkConfig load_config(const fs::path& path) {
  return parse_config(detail::read_json(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

}  // namespace eegbench::bench
