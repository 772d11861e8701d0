#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <vector>

#include "eegbench/dsp/butterworth.hpp"

namespace eegbench::dsp {

namespace detail {

/// Transposed direct form II, in place, with per-section state (z1, z2).
inline void sosfilt_inplace(const BiquadCascade& f, std::vector<double>& x,
                            std::vector<std::array<double, 2>>& state) {
  for (std::size_t s = 0; s < f.sections.size(); ++s) {
    const Biquad& q = f.sections[s];
    double z1 = state[s][0], z2 = state[s][1];
    for (double& v : x) {
      const double in = v;
      const double y = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * y + z2;
      z2 = q.b2 * in - q.a2 * y;
      v = y;
    }
    state[s] = {z1, z2};
  }
}

/// Step-response initial state for a unit input, cascaded: each section sees
/// the DC gain of the sections before it.
inline std::vector<std::array<double, 2>> sosfilt_zi(const BiquadCascade& f) {
  std::vector<std::array<double, 2>> zi;
  double scale = 1.0;
  for (const Biquad& q : f.sections) {
    const double yss = q.dc_gain();
    zi.push_back({scale * (yss - q.b0), scale * (q.b2 - q.a2 * yss)});
    scale *= yss;
  }
  return zi;
}

}  // namespace detail

inline std::size_t filtfilt_padlen(const BiquadCascade& f) {
  return 3 * (2 * f.sections.size() + 1);
}

namespace detail {

/// One forward pass, reverse, backward pass, reverse over the padded signal.
inline std::vector<double> forward_backward(const BiquadCascade& f, std::vector<double> ext,
                                            const std::vector<std::array<double, 2>>& zi) {
  auto scaled = [&](double x0) {
    auto s = zi;
    for (auto& st : s) st = {st[0] * x0, st[1] * x0};
    return s;
  };
  auto state = scaled(ext.front());
  sosfilt_inplace(f, ext, state);
  std::reverse(ext.begin(), ext.end());
  state = scaled(ext.front());
  sosfilt_inplace(f, ext, state);
  std::reverse(ext.begin(), ext.end());
  return ext;
}

}  // namespace detail

/// Zero-phase forward-backward filtering with odd-reflection padding and
/// step-matched initial conditions. The forward-first and backward-first
/// passes differ only in their edge transients; averaging them makes the
/// result exactly symmetric under time reversal.
inline std::vector<double> filtfilt(const BiquadCascade& f, const std::vector<double>& x) {
  const std::size_t pad = filtfilt_padlen(f);
  require(x.size() > pad, ErrorCode::SignalTooShort,
          "signal of " + std::to_string(x.size()) + " samples is too short for padding " +
              std::to_string(pad));
  const std::size_t n = x.size();
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = detail::sosfilt_zi(f);
  const auto forward_first = detail::forward_backward(f, ext, zi);
  std::vector<double> rev(ext.rbegin(), ext.rend());
  auto backward_first = detail::forward_backward(f, std::move(rev), zi);
  std::reverse(backward_first.begin(), backward_first.end());

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 0.5 * (forward_first[pad + i] + backward_first[pad + i]);
  return out;
}

/// Row-wise filtfilt of a channels×samples array.
inline Eigen::MatrixXd filtfilt_rows(const BiquadCascade& f, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.rows(); ++c) {
    for (Eigen::Index t = 0; t < x.cols(); ++t) row[static_cast<std::size_t>(t)] = x(c, t);
    const auto y = filtfilt(f, row);
    for (Eigen::Index t = 0; t < x.cols(); ++t) out(c, t) = y[static_cast<std::size_t>(t)];
  }
  return out;
}

}  // namespace eegbench::dsp
