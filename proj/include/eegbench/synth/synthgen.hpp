#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eegbench/core/error.hpp"
#include "eegbench/core/paradigm.hpp"
#include "eegbench/core/random.hpp"
#include "eegbench/dsp/butterworth.hpp"
#include "eegbench/dsp/epochs.hpp"
#include "eegbench/dsp/filtfilt.hpp"

namespace eegbench::synth {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SynthSpec {
  Paradigm paradigm = Paradigm::MI;
  int n_subjects = 1;
  int n_sessions = 1;
  int n_channels = 8;
  int n_trials_per_class = 50;  // ERP: target count; non-targets are 5× this
  int n_classes = 2;
  double sfreq = 128;
  double trial_len_s = 2.0;
  double snr = 1.0;
  double subject_shift = 0.0;
  std::uint64_t seed = 0;
  int sources_per_class = 1;     // MI only
  std::vector<double> freqs;     // SSVEP only; empty → defaults
  bool shuffle_labels = false;   // permute labels after generation

  void validate() const {
    require(n_subjects >= 1 && n_sessions >= 1 && n_channels >= 1 && n_trials_per_class >= 1 && n_classes >= 1,
            ErrorCode::InvalidConfig, "synth counts must be >= 1");
    require(sfreq > 0 && trial_len_s > 0, ErrorCode::InvalidConfig, "sfreq and trial length must be positive");
    require(snr >= 0 && subject_shift >= 0, ErrorCode::InvalidConfig, "snr and subject_shift must be >= 0");
    require(sources_per_class >= 1, ErrorCode::InvalidConfig, "sources_per_class must be >= 1");
    if (paradigm == Paradigm::ERP)
      require(n_classes == 2, ErrorCode::InvalidConfig, "ERP data is target versus non-target");
  }
};

struct SynthSession {
  int subject = 0;
  int session = 0;
  dsp::Recording recording;
};

struct SynthDataset {
  SynthSpec spec;
  std::vector<std::string> class_names;
  std::map<std::string, int> label_map;
  std::vector<SynthSession> sessions;
};

inline constexpr double kRestS = 0.5;  // gap between trials and at both ends

/// Default stimulation frequencies, trimmed to n_classes.
inline std::vector<double> ssvep_frequencies(const SynthSpec& s) {
  std::vector<double> f = s.freqs;
  if (f.empty()) {
    const double base[] = {13, 17, 21, 9, 11, 15, 19, 23};
    for (int k = 0; k < s.n_classes; ++k) f.push_back(k < 8 ? base[k] : 8.0 + 1.5 * k);
  }
  require(int(f.size()) == s.n_classes, ErrorCode::InvalidConfig, "need one frequency per class");
  for (double v : f)
    require(v > 0 && 2 * v < s.sfreq / 2, ErrorCode::InvalidBand,
            "frequency " + std::to_string(v) + " Hz leaves no harmonic room below Nyquist");
  return f;
}

inline std::string frequency_name(double f) {
  std::string s = std::to_string(f);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return s;
}

namespace detail {

inline VectorXd gaussian(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline VectorXd unit(VectorXd v) { return v / v.norm(); }

/// Unit-variance noise with a 1/f power spectrum (DC removed).
inline VectorXd pink_noise(Rng& rng, Eigen::Index n) {
  Eigen::Index m = 1;
  while (m < n) m <<= 1;
  const VectorXd white = gaussian(rng, m);
  Eigen::FFT<double> fft;
  std::vector<double> in(white.data(), white.data() + m);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  spec[0] = 0;
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = double(std::min<std::size_t>(k, std::size_t(m) - k));
    spec[k] /= std::sqrt(f);
  }
  std::vector<double> out;
  fft.inv(out, spec);
  VectorXd v = Eigen::Map<VectorXd>(out.data(), n);
  v.array() -= v.mean();
  const double sd = std::sqrt(v.squaredNorm() / double(n));
  return sd > 0 ? VectorXd(v / sd) : v;
}

/// Unit-variance noise confined to [lo, hi] Hz.
inline VectorXd band_noise(Rng& rng, Eigen::Index n, double lo, double hi, double sfreq) {
  const auto f = dsp::design_butter_bandpass(lo, hi, sfreq);
  VectorXd w = gaussian(rng, n);
  std::vector<double> x(w.data(), w.data() + n);
  x = dsp::filtfilt(f, x);
  VectorXd v = Eigen::Map<VectorXd>(x.data(), n);
  v.array() -= v.mean();
  return v / std::sqrt(v.squaredNorm() / double(n));
}

/// Pattern perturbed for a subject and renormalized.
inline VectorXd shifted(const VectorXd& base, double shift, Rng& rng) {
  if (shift == 0) return base;
  return unit(base + shift * gaussian(rng, base.size()) / std::sqrt(double(base.size())));
}

}  // namespace detail

/// Trial label sequence: balanced (ERP: 1 target per 5 non-targets), shuffled.
inline std::vector<int> trial_labels(const SynthSpec& s, Rng& rng) {
  std::vector<int> labels;
  if (s.paradigm == Paradigm::ERP) {
    labels.assign(std::size_t(s.n_trials_per_class) * 5, 0);
    labels.insert(labels.end(), std::size_t(s.n_trials_per_class), 1);
  } else {
    for (int k = 0; k < s.n_classes; ++k) labels.insert(labels.end(), std::size_t(s.n_trials_per_class), k);
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

/// Generates one continuous recording per (subject, session). MI trials carry
/// class-specific 10–14 Hz sources, ERP targets a 300 ms bump, SSVEP trials
/// sinusoids at f and 2f. Background is independent pink noise per channel.
inline SynthDataset generate(const SynthSpec& s) {
  s.validate();
  SynthDataset out;
  out.spec = s;
  std::vector<double> freqs;
  switch (s.paradigm) {
    case Paradigm::MI:
      for (int k = 0; k < s.n_classes; ++k) out.class_names.push_back("class" + std::to_string(k));
      break;
    case Paradigm::ERP: out.class_names = {"NonTarget", "Target"}; break;
    case Paradigm::SSVEP:
      freqs = ssvep_frequencies(s);
      for (double f : freqs) out.class_names.push_back(frequency_name(f));
      break;
  }
  for (std::size_t k = 0; k < out.class_names.size(); ++k) out.label_map[out.class_names[k]] = int(k);

  const Eigen::Index n = s.n_channels;
  const auto trial_len = Eigen::Index(std::lround(s.trial_len_s * s.sfreq));
  const auto rest = Eigen::Index(std::lround(kRestS * s.sfreq));

  // Population-level spatial patterns, shared by every subject before the shift.
  Rng pattern_rng(derive_seed(s.seed, "patterns"));
  std::vector<std::vector<VectorXd>> mi_patterns(std::size_t(s.n_classes));
  for (auto& per_class : mi_patterns)
    for (int j = 0; j < s.sources_per_class; ++j) per_class.push_back(detail::unit(detail::gaussian(pattern_rng, n)));
  const VectorXd evoked_pattern = detail::unit(detail::gaussian(pattern_rng, n).cwiseAbs());
  const VectorXd ssvep_pattern = detail::unit(detail::gaussian(pattern_rng, n).cwiseAbs());
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases;
  for (int k = 0; k < s.n_classes; ++k) phases.push_back(phase_dist(pattern_rng));

  for (int subj = 0; subj < s.n_subjects; ++subj) {
    Rng subject_rng(derive_seed(s.seed, "subject", subj));
    std::vector<std::vector<VectorXd>> mi = mi_patterns;
    for (auto& per_class : mi)
      for (auto& p : per_class) p = detail::shifted(p, s.subject_shift, subject_rng);
    const VectorXd evoked = detail::shifted(evoked_pattern, s.subject_shift, subject_rng);
    const VectorXd ssvep = detail::shifted(ssvep_pattern, s.subject_shift, subject_rng);

    for (int sess = 0; sess < s.n_sessions; ++sess) {
      Rng rng(derive_seed(s.seed, "subject", subj, "session", sess));
      std::vector<int> labels = trial_labels(s, rng);
      const auto n_trials = Eigen::Index(labels.size());
      const Eigen::Index total = rest + n_trials * (trial_len + rest);
      MatrixXd data(n, total);
      for (Eigen::Index c = 0; c < n; ++c) data.row(c) = detail::pink_noise(rng, total).transpose();

      std::vector<dsp::Event> events;
      for (Eigen::Index t = 0; t < n_trials; ++t) {
        const Eigen::Index onset = rest + t * (trial_len + rest);
        const int label = labels[std::size_t(t)];
        events.push_back({onset, out.class_names[std::size_t(label)]});
        if (s.snr == 0) continue;
        auto block = data.middleCols(onset, trial_len);
        switch (s.paradigm) {
          case Paradigm::MI:
            for (const auto& p : mi[std::size_t(label)]) {
              const VectorXd src = detail::band_noise(rng, trial_len, 10.0, 14.0, s.sfreq);
              block += std::sqrt(s.snr) * p * src.transpose();
            }
            break;
          case Paradigm::ERP:
            if (label == 1) {
              Eigen::RowVectorXd bump(trial_len);
              for (Eigen::Index i = 0; i < trial_len; ++i) {
                const double dt = double(i) / s.sfreq - 0.3;
                bump(i) = std::exp(-dt * dt / (2 * 0.05 * 0.05));
              }
              // Unit mean power over the trial, as for the MI source, so snr
              // is a power ratio in every paradigm.
              bump /= std::sqrt(bump.squaredNorm() / double(trial_len));
              block += std::sqrt(s.snr) * evoked * bump;
            }
            break;
          case Paradigm::SSVEP: {
            const double f = freqs[std::size_t(label)];
            Eigen::RowVectorXd wave(trial_len);
            for (Eigen::Index i = 0; i < trial_len; ++i) {
              const double t_s = double(i) / s.sfreq;
              const double ph = phases[std::size_t(label)];
              // Amplitude falls as 1/frequency: the 2f component has half the amplitude.
              wave(i) = std::sin(2 * std::numbers::pi * f * t_s + ph) +
                        0.5 * std::sin(2 * std::numbers::pi * 2 * f * t_s + 2 * ph);
            }
            block += std::sqrt(2.0 * s.snr) * ssvep * wave;
            break;
          }
        }
      }
      if (s.shuffle_labels) {
        Rng shuffle_rng(derive_seed(s.seed, "shuffle", subj, sess));
        std::vector<std::string> names;
        for (const auto& e : events) names.push_back(e.label);
        std::shuffle(names.begin(), names.end(), shuffle_rng);
        for (std::size_t i = 0; i < events.size(); ++i) events[i].label = names[i];
      }
      out.sessions.push_back({subj, sess, dsp::Recording{std::move(data), s.sfreq, std::move(events)}});
    }
  }
  return out;
}

/// Bandpass the continuous recording with the paradigm band, then cut
/// [0, trial_len] epochs.
inline dsp::Epochs session_epochs(const SynthDataset& d, const SynthSession& session) {
  const auto [lo, hi] = default_band(d.spec.paradigm);
  const auto f = dsp::design_butter_bandpass(lo, std::min(hi, 0.45 * d.spec.sfreq), d.spec.sfreq);
  dsp::Recording filtered = session.recording;
  filtered.data = dsp::filtfilt_rows(f, session.recording.data);
  dsp::Epochs e = dsp::epoch(filtered, 0.0, d.spec.trial_len_s, d.label_map).epochs;
  return e;
}

}  // namespace eegbench::synth
