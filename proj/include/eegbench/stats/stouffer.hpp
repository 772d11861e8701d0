#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "eegbench/stats/paired.hpp"

namespace eegbench::stats {

inline constexpr double kPClamp = 1e-12;

struct CombinedStat {
  double z = 0;
  double p_value = 1;
  std::optional<double> combined_smd;  // empty if any dataset's effect is undefined
  std::vector<double> weights;
  bool clamped = false;  // some input p was pushed into [1e-12, 1 − 1e-12]
};

/// Sample-size weighted Stouffer: w_i = √(N_i/ΣN_j), Z = Σ w_i Φ⁻¹(1 − p_i),
/// p = 1 − Φ(Z), S = Σ w_i s_i.
inline CombinedStat stouffer_combine(const std::vector<DatasetStat>& stats) {
  require(!stats.empty(), ErrorCode::InvalidInput, "nothing to combine");
  double total = 0;
  for (const auto& s : stats) {
    require(s.n_subjects >= 1, ErrorCode::InvalidInput, "dataset without subjects");
    total += double(s.n_subjects);
  }
  CombinedStat out;
  double smd_acc = 0;
  bool smd_defined = true;
  for (const auto& s : stats) {
    require(std::isfinite(s.p_value), ErrorCode::InvalidInput, "non-finite p-value");
    double p = s.p_value;
    if (p < kPClamp || p > 1.0 - kPClamp) {
      p = std::clamp(p, kPClamp, 1.0 - kPClamp);
      out.clamped = true;
    }
    const double w = std::sqrt(double(s.n_subjects) / total);
    out.weights.push_back(w);
    // Φ⁻¹(1 − p) = −Φ⁻¹(p), which stays accurate for tiny p.
    out.z += w * -phi_inv(p);
    if (s.smd) smd_acc += w * *s.smd;
    else smd_defined = false;
  }
  out.p_value = normal_sf(out.z);
  if (smd_defined) out.combined_smd = smd_acc;
  return out;
}

}  // namespace eegbench::stats
