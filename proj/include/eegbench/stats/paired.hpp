#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eegbench/core/random.hpp"
#include "eegbench/stats/normal.hpp"

namespace eegbench::stats {

/// Which side the one-tailed tests put the alternative on: Greater means A > B.
enum class Alternative { Greater, Less };

enum class Method { PermExact, PermMc, Wilcoxon };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::PermExact: return "perm_exact";
    case Method::PermMc: return "perm_mc";
    case Method::Wilcoxon: return "wilcoxon";
  }
  return "unknown";
}

inline constexpr int kExactMaxN = 12;     // N < 13: all 2^N sign flips
inline constexpr int kMonteCarloMaxN = 20;  // 13 ≤ N ≤ 20: random flips
inline constexpr int kDefaultPermutations = 10000;

inline Method method_for(std::size_t n) {
  if (n <= static_cast<std::size_t>(kExactMaxN)) return Method::PermExact;
  if (n <= static_cast<std::size_t>(kMonteCarloMaxN)) return Method::PermMc;
  return Method::Wilcoxon;
}

namespace detail {

inline std::vector<double> differences(std::span<const double> a, std::span<const double> b,
                                       Alternative alt) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch, "paired scores differ in length");
  require(a.size() >= 2, ErrorCode::InvalidInput, "paired test needs at least 2 subjects");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::isfinite(a[i]) && std::isfinite(b[i]), ErrorCode::InvalidInput, "non-finite score");
    d[i] = alt == Alternative::Greater ? a[i] - b[i] : b[i] - a[i];
  }
  return d;
}

/// Paired t statistic from the sum and sum of squares; the sum of squares is
/// invariant under sign flips, so permutations only change the sum.
/// Zero spread maps to ±inf (or 0 when the mean is 0 too).
inline double t_from_sums(double sum, double sumsq, double n) {
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
  const double scale = std::sqrt(var / n);
  if (scale <= 1e-14 * std::max(1.0, std::abs(mean))) {
    if (mean > 0) return std::numeric_limits<double>::infinity();
    if (mean < 0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  }
  return mean / scale;
}

inline bool at_least(double t_perm, double t_obs) {
  if (std::isinf(t_obs)) return t_perm >= t_obs;
  return t_perm >= t_obs - 1e-12 * std::max(1.0, std::abs(t_obs));
}

}  // namespace detail

/// Paired t statistic mean(d)/(std(d)/√N) with d = a − b.
inline double paired_t(std::span<const double> a, std::span<const double> b) {
  const auto d = detail::differences(a, b, Alternative::Greater);
  double s = 0, ss = 0;
  for (double v : d) {
    s += v;
    ss += v * v;
  }
  return detail::t_from_sums(s, ss, double(d.size()));
}

struct PermutationOptions {
  int n_mc = kDefaultPermutations;
  std::uint64_t seed = 0;
  Alternative alternative = Alternative::Greater;
  std::optional<Method> force;  // validation mode: exact or Monte-Carlo regardless of N
};

/// One-tailed sign-flip permutation paired t-test. Exhaustive for N < 13 (the
/// identity flip is one of the 2^N), otherwise n_mc seeded random flips plus
/// the identity, p = (1 + #{T_perm ≥ T_obs})/(n_mc + 1). All-zero
/// differences give p = 1.
inline double perm_paired_ttest(std::span<const double> a, std::span<const double> b,
                                const PermutationOptions& opt = {}) {
  const auto d = detail::differences(a, b, opt.alternative);
  const std::size_t n = d.size();
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) return 1.0;
  double sum = 0, sumsq = 0;
  for (double v : d) {
    sum += v;
    sumsq += v * v;
  }
  const double nd = double(n);
  const double t_obs = detail::t_from_sums(sum, sumsq, nd);

  const Method method = opt.force.value_or(method_for(n) == Method::PermExact ? Method::PermExact
                                                                             : Method::PermMc);
  if (method == Method::PermExact) {
    require(n < 31, ErrorCode::InvalidInput, "exhaustive permutation limited to N < 31");
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1) ? -d[i] : d[i];
      if (detail::at_least(detail::t_from_sums(s, sumsq, nd), t_obs)) ++count;
    }
    return double(count) / double(total);
  }

  require(opt.n_mc >= 1, ErrorCode::InvalidInput, "n_mc must be positive");
  Rng rng(opt.seed);
  std::uint64_t count = 0;
  for (int k = 0; k < opt.n_mc; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (rng() & 1) ? -d[i] : d[i];
    if (detail::at_least(detail::t_from_sums(s, sumsq, nd), t_obs)) ++count;
  }
  return double(count + 1) / double(opt.n_mc + 1);
}

/// Midranks (1-based) of the values, ties share their average rank.
inline std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

/// One-tailed Wilcoxon signed-rank, normal approximation with tie-corrected
/// variance and continuity correction. Zero differences are dropped.
inline double wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                   Alternative alt = Alternative::Greater) {
  const auto all = detail::differences(a, b, alt);
  std::vector<double> d, absd;
  for (double v : all)
    if (v != 0.0) {
      d.push_back(v);
      absd.push_back(std::abs(v));
    }
  if (d.empty()) return 1.0;
  const double n = double(d.size());
  const auto ranks = midranks(absd);
  double w_plus = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) w_plus += ranks[i];

  std::vector<double> sorted = absd;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = double(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mean = n * (n + 1) / 4.0;
  const double var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0;
  if (!(var > 0)) return 1.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  return std::clamp(normal_sf(z), std::numeric_limits<double>::min(), 1.0);
}

/// Standardized mean difference of paired scores, Hedges-corrected:
/// mean(d)/sd(d) · (1 − 3/(4(N−1)−1)).
inline double smd(std::span<const double> a, std::span<const double> b) {
  const auto d = detail::differences(a, b, Alternative::Greater);
  const double n = double(d.size());
  double mean = 0;
  for (double v : d) mean += v;
  mean /= n;
  double var = 0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= (n - 1);
  const double sd = std::sqrt(var);
  if (!(sd > 1e-14 * std::max(1.0, std::abs(mean))))
    fail(ErrorCode::EffectUndefined, "zero variance of paired differences");
  const double j = 1.0 - 3.0 / (4.0 * (n - 1.0) - 1.0);
  return mean / sd * j;
}

struct DatasetStat {
  std::string dataset_id;
  std::size_t n_subjects = 0;
  double p_value = 1.0;
  std::optional<double> smd;  // empty when undefined (zero spread, nonzero mean)
  Method method = Method::PermExact;
};

/// Dispatch per subject count: N < 13 exhaustive, 13 ≤ N ≤ 20 Monte-Carlo,
/// N > 20 Wilcoxon. All-identical scores give smd 0.
inline DatasetStat compare_pipelines(const std::string& dataset_id, std::span<const double> a,
                                     std::span<const double> b, const PermutationOptions& opt = {}) {
  DatasetStat out;
  out.dataset_id = dataset_id;
  out.n_subjects = a.size();
  out.method = method_for(a.size());
  PermutationOptions o = opt;
  o.force.reset();
  out.p_value = out.method == Method::Wilcoxon ? wilcoxon_signed_rank(a, b, opt.alternative)
                                               : perm_paired_ttest(a, b, o);
  const auto d = detail::differences(a, b, Alternative::Greater);
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
    out.smd = 0.0;
  } else {
    try {
      const double s = smd(a, b);
      out.smd = opt.alternative == Alternative::Greater ? s : -s;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EffectUndefined) throw;
    }
  }
  return out;
}

}  // namespace eegbench::stats
