// Command-line front end: run, synth, stats, report.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "eegbench/bench/bundle.hpp"
#include "eegbench/bench/config.hpp"
#include "eegbench/bench/csv.hpp"
#include "eegbench/bench/report.hpp"
#include "eegbench/bench/runner.hpp"
#include "eegbench/bench/stats_report.hpp"
#include "eegbench/eval/from_synth.hpp"

namespace bench = eegbench::bench;
namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config, const std::string& out, std::optional<int> jobs,
            std::optional<std::uint64_t> seed, bool measured) {
  auto j = bench::detail::read_json(config);
  // --seed must also reach derived synth seeds, so it is applied before parsing.
  if (seed) j["seed"] = *seed;
  const fs::path p(config);
  auto c = bench::parse_config(j, p.has_parent_path() ? p.parent_path() : fs::path("."));
  if (jobs) {
    eegbench::require(*jobs >= 1, eegbench::ErrorCode::InvalidConfig, "--jobs must be >= 1");
    c.plan.jobs = *jobs;
  }
  if (!out.empty()) c.output_dir = out;
  if (measured) c.reproducible = false;
  const auto res = bench::run_benchmark(c, &std::cerr);
  std::map<std::string, int> counts;
  for (const auto& i : res.issues) ++counts[i.severity + " " + i.code];
  for (const auto& [what, n] : counts) std::cerr << n << " x " << what << " (see errors.json)\n";
  return res.rows.empty() ? 1 : 0;
}

int cmd_synth(const std::string& paradigm, const std::string& spec_path, const std::string& out,
              const std::string& id) {
  const auto j = spec_path.empty() ? bench::Json::object() : bench::detail::read_json(spec_path);
  const auto par = eegbench::parse_paradigm(paradigm);
  const auto spec = bench::parse_synth_spec(j, 0, par);
  const auto d = eegbench::eval::from_synth(eegbench::synth::generate(spec), id);
  const auto b = bench::to_bundle(d, par);
  bench::save_bundle(b, out);
  std::cerr << b.data.size() << " trials written to " << out << '\n';
  return 0;
}

int cmd_stats(const std::string& results, const std::vector<std::string>& pair, const std::string& out,
              std::uint64_t seed) {
  const auto rows = bench::parse_results(bench::read_text(results));
  const auto j = pair.empty() ? bench::all_comparisons(rows, seed) : bench::compare_results(rows, pair[0], pair[1], seed);
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    bench::detail::write_file(out, text);
  return 0;
}

int cmd_report(const std::string& results, const std::string& format, const std::string& reference) {
  if (!results.empty()) {
    const auto rows = bench::parse_results(bench::read_text(results));
    std::cout << (format == "csv" ? bench::report_csv(rows) : bench::report_markdown(rows));
  }
  if (!reference.empty()) {
    const auto ref = bench::load_reference(reference);
    if (format == "csv") {
      std::cout << bench::render_summary_csv(ref.table);
    } else {
      std::cout << (results.empty() ? "" : "\n") << "Reference (not reproduced): " << reference << "\n\n"
                << bench::render_markdown(ref.table);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG decoding benchmark"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "evaluate pipelines on configured datasets");
  std::string config, out;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  bool measured = false;
  run->add_option("--config", config, "benchmark JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (overrides output_dir)");
  run->add_option("--jobs", jobs, "worker threads");
  run->add_option("--seed", seed, "master seed");
  run->add_flag("--measured-timing", measured, "write measured timing into results.csv");

  auto* syn = app.add_subcommand("synth", "write a synthetic epoch bundle");
  std::string paradigm, spec, syn_out, syn_id = "synth";
  syn->add_option("--paradigm", paradigm, "mi, erp or ssvep")->required();
  syn->add_option("--spec", spec, "generator JSON")->check(CLI::ExistingFile);
  syn->add_option("--out", syn_out, "bundle directory")->required();
  syn->add_option("--id", syn_id, "dataset id stored in the bundle");

  auto* st = app.add_subcommand("stats", "paired comparison of two pipelines");
  std::string st_results, st_out;
  std::vector<std::string> pair;
  std::uint64_t st_seed = 0;
  st->add_option("--results", st_results, "results.csv")->required()->check(CLI::ExistingFile);
  st->add_option("--compare", pair, "pipelines A B (all ordered pairs if omitted)")->expected(2);
  st->add_option("--out", st_out, "write JSON here instead of stdout");
  st->add_option("--seed", st_seed, "Monte Carlo seed");

  auto* rep = app.add_subcommand("report", "summary tables");
  std::string rep_results, format = "md", reference;
  rep->add_option("--results", rep_results, "results.csv")->check(CLI::ExistingFile);
  rep->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  rep->add_option("--reference", reference, "published table fixture to display")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, jobs, seed, measured);
    if (*syn) return cmd_synth(paradigm, spec, syn_out, syn_id);
    if (*st) return cmd_stats(st_results, pair, st_out, st_seed);
    if (*rep) {
      if (rep_results.empty() && reference.empty()) {
        std::cerr << "report: give --results and/or --reference\n";
        return 2;
      }
      return cmd_report(rep_results, format, reference);
    }
  } catch (const eegbench::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
