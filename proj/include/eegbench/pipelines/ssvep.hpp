#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "eegbench/dsp/epochs.hpp"
#include "eegbench/pipelines/linalg.hpp"

namespace eegbench::pipelines {

/// Stimulation frequency of each class, parsed from its class name ("13", "13.5Hz").
inline std::vector<double> ssvep_frequencies(const dsp::Epochs& e, const std::vector<int>& classes) {
  std::vector<double> freqs;
  for (int c : classes) {
    require(c >= 0 && std::size_t(c) < e.class_names.size(), ErrorCode::InvalidInput,
            "class " + std::to_string(c) + " has no name to read a frequency from");
    const std::string& name = e.class_names[std::size_t(c)];
    char* end = nullptr;
    const double f = std::strtod(name.c_str(), &end);
    require(end != name.c_str() && std::isfinite(f) && f > 0, ErrorCode::InvalidInput,
            "class name '" + name + "' is not a frequency");
    freqs.push_back(f);
  }
  return freqs;
}

/// Reference signals sin/cos(2π·k·f·t), k = 1..n_harmonics, as rows.
inline Matrix cca_reference(double freq, double sfreq, Eigen::Index samples, int n_harmonics) {
  require(n_harmonics >= 1, ErrorCode::InvalidHyper, "need at least one harmonic");
  require(n_harmonics * freq < sfreq / 2, ErrorCode::InvalidBand,
          "harmonic " + std::to_string(n_harmonics) + " of " + std::to_string(freq) + " Hz exceeds Nyquist");
  Matrix y(2 * n_harmonics, samples);
  for (int k = 1; k <= n_harmonics; ++k)
    for (Eigen::Index t = 0; t < samples; ++t) {
      const double phase = 2.0 * std::numbers::pi * k * freq * double(t) / sfreq;
      y(2 * (k - 1), t) = std::sin(phase);
      y(2 * (k - 1) + 1, t) = std::cos(phase);
    }
  return y;
}

namespace detail {

inline Matrix floored_invsqrt(const Matrix& c) {
  const spd::EigenPair e = spd::sym_eig_unchecked(spd::symmetrize(c));
  const double floor = 1e-10 * std::max(e.eigenvalues(0), std::numeric_limits<double>::min());
  const Vector s = e.eigenvalues.unaryExpr([&](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });
  return e.eigenvectors * s.asDiagonal() * e.eigenvectors.transpose();
}

}  // namespace detail

/// Largest canonical correlation between the rows of x and y, as the top
/// singular value of C_xx^{-1/2} C_xy C_yy^{-1/2}; clamped to [0, 1].
inline double canonical_correlation(const Matrix& x, const Matrix& y) {
  require(x.cols() == y.cols(), ErrorCode::DimensionMismatch, "signals differ in length");
  const Matrix xc = x.colwise() - x.rowwise().mean();
  const Matrix yc = y.colwise() - y.rowwise().mean();
  const Matrix m = detail::floored_invsqrt(xc * xc.transpose()) * (xc * yc.transpose()) *
                   detail::floored_invsqrt(yc * yc.transpose());
  Eigen::JacobiSVD<Matrix> svd(m);
  return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

/// Training-free CCA frequency detector.
class CcaDetector {
 public:
  CcaDetector(std::vector<double> freqs, std::vector<int> classes, double sfreq, int n_harmonics)
      : freqs_(std::move(freqs)), classes_(std::move(classes)), sfreq_(sfreq), harmonics_(n_harmonics) {
    for (double f : freqs_) cca_reference(f, sfreq_, 1, harmonics_);  // Nyquist check
  }

  Vector correlations(const Matrix& trial) const {
    Vector rho(Eigen::Index(freqs_.size()));
    for (std::size_t k = 0; k < freqs_.size(); ++k)
      rho(Eigen::Index(k)) = canonical_correlation(trial, cca_reference(freqs_[k], sfreq_, trial.cols(), harmonics_));
    return rho;
  }

  Matrix predict_proba(const std::vector<Matrix>& trials) const {
    Matrix rho(Eigen::Index(trials.size()), Eigen::Index(freqs_.size()));
    for (std::size_t i = 0; i < trials.size(); ++i) rho.row(Eigen::Index(i)) = correlations(trials[i]).transpose();
    return softmax_rows(rho);
  }

  const std::vector<int>& classes() const { return classes_; }

 private:
  std::vector<double> freqs_;
  std::vector<int> classes_;
  double sfreq_;
  int harmonics_;
};

struct TrcaFilter {
  Vector w;
  double eigenvalue = 0;
};

/// Leading solution of max wᵀSw / wᵀQw, S = Σ_{i≠j} X_i X_jᵀ, Q = Σ_i X_i X_iᵀ.
inline TrcaFilter trca_filter(const std::vector<Matrix>& trials) {
  require(trials.size() >= 2, ErrorCode::DegenerateLabels, "TRCA needs at least two trials per class");
  const Eigen::Index n = trials.front().rows();
  Matrix sum = Matrix::Zero(n, trials.front().cols());
  Matrix q = Matrix::Zero(n, n);
  for (const auto& x : trials) {
    require(x.rows() == n && x.cols() == sum.cols(), ErrorCode::DimensionMismatch, "ragged trials");
    const Matrix xc = x.colwise() - x.rowwise().mean();
    sum += xc;
    q += xc * xc.transpose();
  }
  const Matrix s = sum * sum.transpose() - q;
  const spd::EigenPair e = gen_eig_floored(s, q);
  Matrix w = e.eigenvectors.leftCols(1);
  canonical_sign(w);
  return TrcaFilter{w.col(0), e.eigenvalues(0)};
}

inline double pearson(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const Eigen::RowVectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
  const double den = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  if (!(den > 0)) return 0.0;
  return std::clamp(ac.dot(bc) / den, -1.0, 1.0);
}

/// Task-related component analysis: one filter and template per class, the
/// prediction score is the Pearson correlation with each class template.
class Trca {
 public:
  void fit(const dsp::Epochs& train) {
    classes_ = sorted_classes(train.labels);
    require(classes_.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
    filters_.clear();
    templates_.clear();
    for (int c : classes_) {
      std::vector<Matrix> members;
      for (std::size_t i = 0; i < train.size(); ++i)
        if (train.labels[i] == c) members.push_back(train.data[i]);
      const TrcaFilter f = trca_filter(members);
      Matrix mean = Matrix::Zero(members.front().rows(), members.front().cols());
      for (const auto& m : members) mean += m;
      mean /= double(members.size());
      filters_.push_back(f.w);
      templates_.push_back(f.w.transpose() * mean);
    }
  }

  Vector correlations(const Matrix& trial) const {
    Vector r(Eigen::Index(classes_.size()));
    for (std::size_t k = 0; k < classes_.size(); ++k) {
      require(trial.rows() == filters_[k].size() && trial.cols() == templates_[k].size(),
              ErrorCode::DimensionMismatch, "trial shape differs from training");
      r(Eigen::Index(k)) = pearson(filters_[k].transpose() * trial, templates_[k]);
    }
    return r;
  }

  Matrix predict_proba(const std::vector<Matrix>& trials) const {
    Matrix r(Eigen::Index(trials.size()), Eigen::Index(classes_.size()));
    for (std::size_t i = 0; i < trials.size(); ++i) r.row(Eigen::Index(i)) = correlations(trials[i]).transpose();
    return softmax_rows(r);
  }

  const std::vector<int>& classes() const { return classes_; }

 private:
  std::vector<int> classes_;
  std::vector<Vector> filters_;
  std::vector<Eigen::RowVectorXd> templates_;
};

}  // namespace eegbench::pipelines
