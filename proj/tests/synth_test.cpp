#include <gtest/gtest.h>

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <vector>

#include "eegbench/eval/evaluate.hpp"
#include "eegbench/eval/from_synth.hpp"
#include "eegbench/synth/synthgen.hpp"

namespace eegbench::synth {
namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidInput;
}

SynthSpec spec(Paradigm p, double snr, std::uint64_t seed) {
  SynthSpec s;
  s.paradigm = p;
  s.snr = snr;
  s.seed = seed;
  s.n_channels = 8;
  s.n_trials_per_class = 50;
  if (p == Paradigm::ERP) s.n_trials_per_class = 20;
  if (p == Paradigm::SSVEP) s.n_classes = 3;
  return s;
}

double within_mean(const SynthSpec& s, const std::string& pipeline, std::uint64_t seed = 1) {
  eval::EvaluationPlan plan;
  plan.seed = seed;
  const auto out = eval::within_session_evaluate({eval::from_synth(generate(s), "D")}, {{pipeline, {}}}, plan);
  EXPECT_TRUE(out.issues.empty());
  double sum = 0;
  for (const auto& r : out.rows) sum += r.score;
  return sum / double(out.rows.size());
}

// Mean periodogram over trials and channels.
std::vector<double> periodogram(const std::vector<Eigen::MatrixXd>& trials) {
  Eigen::FFT<double> fft;
  std::vector<double> p;
  for (const auto& t : trials)
    for (Eigen::Index c = 0; c < t.rows(); ++c) {
      std::vector<double> x(std::size_t(t.cols()));
      for (Eigen::Index i = 0; i < t.cols(); ++i) x[std::size_t(i)] = t(c, i);
      std::vector<std::complex<double>> X;
      fft.fwd(X, x);
      p.resize(X.size() / 2 + 1, 0.0);
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += std::norm(X[k]);
    }
  return p;
}

TEST(Synth, BitwiseDeterministic) {
  for (Paradigm p : {Paradigm::MI, Paradigm::ERP, Paradigm::SSVEP}) {
    auto s = spec(p, 2, 42);
    s.n_subjects = 2;
    const auto a = generate(s), b = generate(s);
    ASSERT_EQ(a.sessions.size(), b.sessions.size());
    for (std::size_t i = 0; i < a.sessions.size(); ++i) {
      EXPECT_TRUE((a.sessions[i].recording.data.array() == b.sessions[i].recording.data.array()).all());
      ASSERT_EQ(a.sessions[i].recording.events.size(), b.sessions[i].recording.events.size());
      for (std::size_t e = 0; e < a.sessions[i].recording.events.size(); ++e)
        EXPECT_EQ(a.sessions[i].recording.events[e].label, b.sessions[i].recording.events[e].label);
    }
    // Subjects draw distinct streams.
    EXPECT_FALSE(a.sessions[0].recording.data.isApprox(a.sessions[1].recording.data));
  }
}

TEST(Synth, LabelBalance) {
  auto mi = spec(Paradigm::MI, 1, 1);
  mi.n_classes = 4;
  const auto m = session_epochs(generate(mi), generate(mi).sessions[0]);
  for (int c = 0; c < 4; ++c) EXPECT_EQ(std::count(m.labels.begin(), m.labels.end(), c), 50);

  const auto erp = generate(spec(Paradigm::ERP, 1, 1));
  const auto e = session_epochs(erp, erp.sessions[0]);
  EXPECT_EQ(std::count(e.labels.begin(), e.labels.end(), 1), 20);
  EXPECT_EQ(std::count(e.labels.begin(), e.labels.end(), 0), 100);
  EXPECT_EQ(e.class_names, (std::vector<std::string>{"NonTarget", "Target"}));
}

TEST(Synth, ErpDifferenceWavePeaksNear300ms) {
  auto s = spec(Paradigm::ERP, 2, 3);
  s.trial_len_s = 0.8;
  const auto d = generate(s);
  const auto e = session_epochs(d, d.sessions[0]);
  Eigen::MatrixXd tgt = Eigen::MatrixXd::Zero(e.channels(), e.samples()), non = tgt;
  int nt = 0, nn = 0;
  for (std::size_t i = 0; i < e.size(); ++i) (e.labels[i] == 1 ? (++nt, tgt) : (++nn, non)) += e.data[i];
  const Eigen::MatrixXd diff = tgt / nt - non / nn;
  Eigen::Index peak;
  diff.colwise().squaredNorm().maxCoeff(&peak);
  EXPECT_NEAR(double(peak) / e.sfreq, 0.3, 0.02);
}

TEST(Synth, SsvepSpectralPeakAtStimulus) {
  const auto s = spec(Paradigm::SSVEP, 1, 4);
  const auto d = generate(s);
  const auto e = session_epochs(d, d.sessions[0]);
  const auto freqs = ssvep_frequencies(s);
  for (int c = 0; c < s.n_classes; ++c) {
    std::vector<Eigen::MatrixXd> trials;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e.labels[i] == c) trials.push_back(e.data[i]);
    const auto p = periodogram(trials);
    const double df = e.sfreq / double(e.samples());
    std::size_t peak = 1;
    for (std::size_t k = 1; k < p.size(); ++k)
      if (p[k] > p[peak]) peak = k;
    EXPECT_LE(std::abs(double(peak) * df - freqs[std::size_t(c)]), df) << "class " << c;
    const auto bin = [&](double f) { return p[std::size_t(std::lround(f / df))]; };
    EXPECT_LT(bin(2 * freqs[std::size_t(c)]), bin(freqs[std::size_t(c)]));
  }
}

TEST(Synth, SsvepAmplitudeFallsWithHarmonic) {
  // Noise-free template: one subject, large snr, and the raw recording.
  auto s = spec(Paradigm::SSVEP, 1e6, 5);
  s.n_trials_per_class = 5;
  const auto d = generate(s);
  const auto e = session_epochs(d, d.sessions[0]);
  const auto freqs = ssvep_frequencies(s);
  std::vector<Eigen::MatrixXd> trials;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e.labels[i] == 0) trials.push_back(e.data[i]);
  const auto p = periodogram(trials);
  const double df = e.sfreq / double(e.samples());
  const double a1 = std::sqrt(p[std::size_t(std::lround(freqs[0] / df))]);
  const double a2 = std::sqrt(p[std::size_t(std::lround(2 * freqs[0] / df))]);
  EXPECT_NEAR(a2 / a1, 0.5, 0.05);
}

TEST(Synth, Validation) {
  auto s = spec(Paradigm::SSVEP, 1, 0);
  s.freqs = {13, 40, 17};
  EXPECT_EQ(code_of([&] { generate(s); }), ErrorCode::InvalidBand);
  auto erp = spec(Paradigm::ERP, 1, 0);
  erp.n_classes = 3;
  EXPECT_EQ(code_of([&] { generate(erp); }), ErrorCode::InvalidConfig);
  auto zero = spec(Paradigm::MI, 1, 0);
  zero.n_channels = 0;
  EXPECT_EQ(code_of([&] { generate(zero); }), ErrorCode::InvalidConfig);
}

TEST(Synth, ZeroSnrIgnoresLabels) {
  // Without a source the recording cannot depend on the label sequence.
  auto a = spec(Paradigm::MI, 0, 6);
  auto b = a;
  b.shuffle_labels = true;
  const auto da = generate(a), db = generate(b);
  EXPECT_TRUE((da.sessions[0].recording.data.array() == db.sessions[0].recording.data.array()).all());
  EXPECT_NEAR(within_mean(a, "CSP+LDA"), 0.5, 0.07);
}

TEST(SynthEndToEnd, MiCspLda) { EXPECT_GT(within_mean(spec(Paradigm::MI, 5, 7), "CSP+LDA"), 0.95); }

TEST(SynthEndToEnd, ErpXdawnCovTsLr) {
  EXPECT_GT(within_mean(spec(Paradigm::ERP, 5, 8), "XDAWNCov+TS+LR"), 0.9);
}

TEST(SynthEndToEnd, SsvepCca) { EXPECT_GT(within_mean(spec(Paradigm::SSVEP, 5, 9), "CCA"), 0.95); }

TEST(SynthEndToEnd, ScoreMonotoneInSnr) {
  const std::pair<Paradigm, const char*> refs[] = {
      {Paradigm::MI, "MDM"}, {Paradigm::MI, "CSP+LDA"}, {Paradigm::SSVEP, "CCA"}};
  for (const auto& [p, name] : refs) {
    double prev = -1;
    for (double snr : {0.0, 1.0, 2.0, 5.0}) {
      double m = 0;
      for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto s = spec(p, snr, seed);
        s.n_trials_per_class = 20;
        m += within_mean(s, name, seed) / 3;
      }
      EXPECT_GE(m, prev) << name << " at snr " << snr;
      prev = m;
    }
  }
}

}  // namespace
}  // namespace eegbench::synth
