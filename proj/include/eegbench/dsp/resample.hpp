#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "eegbench/dsp/epochs.hpp"

namespace eegbench::dsp {

inline constexpr long kMaxResampleFactor = 10000;

/// Smallest p/q (q ≤ kMaxResampleFactor) equal to `ratio` to 1e-9 relative.
inline std::pair<long, long> rational_ratio(double ratio) {
  require(ratio > 0 && std::isfinite(ratio), ErrorCode::InvalidInput, "ratio must be positive");
  for (long q = 1; q <= kMaxResampleFactor; ++q) {
    const double p = std::round(ratio * double(q));
    if (p >= 1 && p <= double(kMaxResampleFactor) &&
        std::abs(p / double(q) - ratio) <= 1e-9 * ratio) {
      const long pi = static_cast<long>(p);
      const long g = std::gcd(pi, q);
      return {pi / g, q / g};
    }
  }
  fail(ErrorCode::UnsupportedRatio, "no rational approximation of " + std::to_string(ratio) +
                                        " with factors <= " + std::to_string(kMaxResampleFactor));
}

/// Kaiser-windowed sinc low-pass with unit DC gain, scaled by the up factor.
inline std::vector<double> resample_kernel(long up, long down, double beta = 5.0) {
  const long max_rate = std::max(up, down);
  const double cutoff = 1.0 / double(max_rate);  // in units of the upsampled Nyquist
  const long half_len = 10 * max_rate;
  const long len = 2 * half_len + 1;
  std::vector<double> h(static_cast<std::size_t>(len));
  double sum = 0;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  for (long n = 0; n < len; ++n) {
    const double m = double(n - half_len);
    const double arg = std::numbers::pi * cutoff * m;
    const double sinc = m == 0 ? 1.0 : std::sin(arg) / arg;
    const double r = 2.0 * double(n) / double(len - 1) - 1.0;
    const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(n)] = cutoff * sinc * w;
    sum += h[static_cast<std::size_t>(n)];
  }
  for (double& v : h) v *= double(up) / sum;
  return h;
}

/// Polyphase up-by-p, filter, down-by-q of one row; zero-padded edges,
/// output length round(n·p/q), group delay compensated.
inline Eigen::RowVectorXd resample_row(const Eigen::RowVectorXd& x, long up, long down,
                                       const std::vector<double>& h) {
  const long n = x.size();
  const long out_len = std::lround(double(n) * double(up) / double(down));
  const long len = static_cast<long>(h.size());
  const long delay = (len - 1) / 2;
  Eigen::RowVectorXd y(out_len);
  for (long m = 0; m < out_len; ++m) {
    const long t = m * down + delay;  // index in the upsampled, filtered stream
    // Input sample k contributes h[t - k·up] when 0 ≤ t - k·up < len.
    long k_lo = t - len + 1 <= 0 ? 0 : (t - len + 1 + up - 1) / up;
    long k_hi = std::min(n - 1, t / up);
    double acc = 0;
    for (long k = k_lo; k <= k_hi; ++k) acc += x(k) * h[static_cast<std::size_t>(t - k * up)];
    y(m) = acc;
  }
  return y;
}

inline Epochs resample(const Epochs& e, double new_sfreq) {
  require(new_sfreq > 0 && std::isfinite(new_sfreq), ErrorCode::InvalidInput,
          "target rate must be positive");
  if (new_sfreq == e.sfreq) return e;
  const auto [up, down] = rational_ratio(new_sfreq / e.sfreq);
  const auto h = resample_kernel(up, down);
  Epochs out{{}, e.labels, new_sfreq, e.tmin, e.class_names};
  out.data.reserve(e.size());
  for (const auto& trial : e.data) {
    const long out_len = std::lround(double(trial.cols()) * double(up) / double(down));
    Eigen::MatrixXd r(trial.rows(), out_len);
    for (Eigen::Index c = 0; c < trial.rows(); ++c)
      r.row(c) = resample_row(trial.row(c), up, down, h);
    out.data.push_back(std::move(r));
  }
  return out;
}

}  // namespace eegbench::dsp
