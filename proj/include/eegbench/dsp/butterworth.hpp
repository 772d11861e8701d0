#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "eegbench/core/error.hpp"

namespace eegbench::dsp {

using Complex = std::complex<double>;

/// One second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  Complex response(Complex z) const {
    const Complex zi = 1.0 / z;
    return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
  }

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

  std::vector<Complex> poles() const {
    const Complex disc = std::sqrt(Complex(a1 * a1 - 4.0 * a2, 0.0));
    return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
  }
};

struct BiquadCascade {
  std::vector<Biquad> sections;
  double sfreq = 0;

  Complex response_at(double hz) const {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * hz / sfreq);
    Complex h = 1.0;
    for (const auto& s : sections) h *= s.response(z);
    return h;
  }

  double magnitude_at(double hz) const { return std::abs(response_at(hz)); }

  bool is_stable() const {
    for (const auto& s : sections)
      for (const Complex& p : s.poles())
        if (!(std::abs(p) < 1.0)) return false;
    return true;
  }
};

/// Butterworth bandpass of the given prototype order (the cascade has `order`
/// sections, 2·order poles). Edges are prewarped before the bilinear transform.
inline BiquadCascade design_butter_bandpass(double low_hz, double high_hz, double sfreq,
                                            int order = 4) {
  require(sfreq > 0 && std::isfinite(sfreq), ErrorCode::InvalidBand, "sampling rate must be positive");
  require(order >= 1, ErrorCode::InvalidBand, "filter order must be >= 1");
  require(low_hz > 0 && low_hz < high_hz && high_hz < sfreq / 2, ErrorCode::InvalidBand,
          "band edges must satisfy 0 < low < high < sfreq/2");

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sfreq;
  const double wl = fs2 * std::tan(pi * low_hz / sfreq);
  const double wh = fs2 * std::tan(pi * high_hz / sfreq);
  const double w0 = std::sqrt(wl * wh);
  const double bw = wh - wl;

  std::vector<Complex> upper;  // digital poles with Im > 0
  std::vector<double> real_poles;
  for (int k = 1; k <= order; ++k) {
    const Complex proto = std::polar(1.0, pi * (2.0 * k + order - 1) / (2.0 * order));
    const Complex half = proto * bw / 2.0;
    const Complex root = std::sqrt(half * half - w0 * w0);
    for (const Complex s : {half + root, half - root}) {
      const Complex z = (fs2 + s) / (fs2 - s);
      if (std::abs(z.imag()) < 1e-12) real_poles.push_back(z.real());
      else if (z.imag() > 0) upper.push_back(z);
    }
  }

  BiquadCascade out;
  out.sfreq = sfreq;
  for (const Complex& p : upper) out.sections.push_back({1, 0, -1, -2.0 * p.real(), std::norm(p)});
  std::sort(real_poles.begin(), real_poles.end());
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    const double p = real_poles[i], q = real_poles[i + 1];
    out.sections.push_back({1, 0, -1, -(p + q), p * q});
  }
  require(out.sections.size() == static_cast<std::size_t>(order), ErrorCode::InvalidBand,
          "pole pairing failed");

  // Unit gain at the digital image of the analog center frequency.
  const double center_hz = sfreq / pi * std::atan(w0 / fs2);
  const double gain = 1.0 / out.magnitude_at(center_hz);
  const double per_section = std::pow(gain, 1.0 / order);
  for (auto& s : out.sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  require(out.is_stable(), ErrorCode::InvalidBand, "designed filter is unstable");
  return out;
}

}  // namespace eegbench::dsp
