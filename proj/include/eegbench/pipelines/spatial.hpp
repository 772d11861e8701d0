#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "eegbench/dsp/covariance.hpp"
#include "eegbench/dsp/epochs.hpp"
#include "eegbench/dsp/filtfilt.hpp"
#include "eegbench/pipelines/linalg.hpp"

namespace eegbench::pipelines {

/// k spatial filters over n channels.
struct SpatialFilterBank {
  Matrix filters;       // k × n, one filter per row
  Matrix patterns;      // n × k
  Vector eigenvalues;   // length k

  Eigen::Index size() const { return filters.rows(); }
  Matrix apply(const Matrix& trial) const { return filters * trial; }
};

// ------------------------------------------------------------ log-var

struct LogVarResult {
  Matrix features;         // trials × channels
  std::size_t floored = 0; // entries whose variance hit the floor
};

inline constexpr double kVarianceFloor = 1e-20;

inline double log_variance(const Eigen::RowVectorXd& row, std::size_t& floored) {
  require(row.size() >= 2, ErrorCode::SignalTooShort, "variance needs at least 2 samples");
  const double m = row.mean();
  const double v = (row.array() - m).square().sum() / double(row.size() - 1);
  if (!(v > kVarianceFloor)) {
    ++floored;
    return std::log(kVarianceFloor);
  }
  return std::log(v);
}

inline LogVarResult logvar_features(const std::vector<Matrix>& trials) {
  LogVarResult out;
  if (trials.empty()) return out;
  out.features.resize(Eigen::Index(trials.size()), trials.front().rows());
  for (std::size_t t = 0; t < trials.size(); ++t)
    for (Eigen::Index c = 0; c < trials[t].rows(); ++c)
      out.features(Eigen::Index(t), c) = log_variance(trials[t].row(c), out.floored);
  return out;
}

inline LogVarResult logvar_features(const dsp::Epochs& e) { return logvar_features(e.data); }

/// Log-variance of each trial after spatial filtering.
inline Matrix filtered_logvar(const SpatialFilterBank& bank, const std::vector<Matrix>& trials) {
  Matrix out(Eigen::Index(trials.size()), bank.size());
  std::size_t floored = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    require(trials[t].rows() == bank.filters.cols(), ErrorCode::DimensionMismatch,
            "channel count differs from training");
    const Matrix f = bank.apply(trials[t]);
    for (Eigen::Index k = 0; k < f.rows(); ++k) out(Eigen::Index(t), k) = log_variance(f.row(k), floored);
  }
  return out;
}

// ---------------------------------------------------------------- CSP

namespace detail {

/// Indices 0, n−1, 1, n−2, … (largest and smallest eigenvalues alternately).
inline std::vector<Eigen::Index> alternate_extremes(Eigen::Index n, Eigen::Index k) {
  std::vector<Eigen::Index> idx;
  Eigen::Index lo = 0, hi = n - 1;
  while (Eigen::Index(idx.size()) < k) {
    idx.push_back(lo++);
    if (Eigen::Index(idx.size()) < k) idx.push_back(hi--);
  }
  return idx;
}

inline SpatialFilterBank select_filters(const spd::EigenPair& e, const Matrix& denominator,
                                        Eigen::Index nfilter) {
  const Eigen::Index n = e.eigenvalues.size();
  const auto idx = alternate_extremes(n, nfilter);
  Matrix v(n, nfilter);
  Vector lambda(nfilter);
  for (Eigen::Index k = 0; k < nfilter; ++k) {
    v.col(k) = e.eigenvectors.col(idx[size_t(k)]);
    lambda(k) = e.eigenvalues(idx[size_t(k)]);
  }
  canonical_sign(v);
  // With Vᵀ D V = I over the full basis, the patterns (V⁻ᵀ) are D·V.
  return SpatialFilterBank{v.transpose(), denominator * v, lambda};
}

inline void check_nfilter(Eigen::Index nfilter, Eigen::Index n) {
  require(nfilter >= 1 && nfilter <= n, ErrorCode::InvalidHyper,
          "nfilter must be in [1, channels], got " + std::to_string(nfilter));
}

}  // namespace detail

/// CSP: S_d v = λ S_c v with S_d = Σ1 − Σ2, S_c = Σ1 + Σ2, solved by whitening
/// with S_c^{-1/2}. Filters alternate largest and smallest λ.
inline SpatialFilterBank csp_fit(const spd::SpdMatrix& sigma1, const spd::SpdMatrix& sigma2,
                                 Eigen::Index nfilter) {
  spd::require_same_dim(sigma1.dim(), sigma2.dim());
  detail::check_nfilter(nfilter, sigma1.dim());
  const Matrix sd = sigma1.values() - sigma2.values();
  const Matrix sc = sigma1.values() + sigma2.values();
  return detail::select_filters(gen_eig(sd, sc), sc, nfilter);
}

/// Tikhonov-regularized CSP: the denominator becomes S_c + α·tr(S_c)/n·I.
/// The two class directions are the two ends of the same eigenproblem.
inline SpatialFilterBank trcsp_fit(const spd::SpdMatrix& sigma1, const spd::SpdMatrix& sigma2,
                                   Eigen::Index nfilter, double alpha) {
  spd::require_same_dim(sigma1.dim(), sigma2.dim());
  detail::check_nfilter(nfilter, sigma1.dim());
  require(alpha >= 0 && std::isfinite(alpha), ErrorCode::InvalidHyper, "alpha must be >= 0");
  const Eigen::Index n = sigma1.dim();
  const Matrix sd = sigma1.values() - sigma2.values();
  Matrix denom = sigma1.values() + sigma2.values();
  denom.diagonal().array() += alpha * denom.trace() / double(n);
  return detail::select_filters(gen_eig(sd, denom), denom, nfilter);
}

/// Arithmetic mean of per-trial covariances for the trials carrying `label`
/// (or all trials except `label` when `complement`).
inline spd::SpdMatrix class_mean_covariance(const dsp::Epochs& e, int label, dsp::CovEstimator est,
                                            bool complement = false) {
  Matrix acc;
  double count = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if ((e.labels[i] == label) == complement) continue;
    const Matrix c = est == dsp::CovEstimator::Scm ? dsp::scm(e.data[i]) : dsp::shrunk_covariance(e.data[i]);
    if (count == 0) acc = c;
    else acc += c;
    ++count;
  }
  require(count > 0, ErrorCode::DegenerateLabels, "class has no trials");
  return spd::SpdMatrix(spd::symmetrize(acc / count));
}

// -------------------------------------------------------------- XDAWN

/// Mean of the trials labeled `label` (channels × samples).
inline Matrix evoked_template(const dsp::Epochs& e, int label) {
  Matrix acc = Matrix::Zero(e.channels(), e.samples());
  double count = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e.labels[i] == label) {
      acc += e.data[i];
      ++count;
    }
  require(count > 0, ErrorCode::DegenerateLabels, "no trials for label " + std::to_string(label));
  return acc / count;
}

/// Shrunk covariance of all training trials concatenated in time.
inline Matrix signal_covariance(const dsp::Epochs& e) {
  Matrix all(e.channels(), Eigen::Index(e.size()) * e.samples());
  for (std::size_t i = 0; i < e.size(); ++i) all.middleCols(Eigen::Index(i) * e.samples(), e.samples()) = e.data[i];
  return dsp::shrunk_covariance(all);
}

/// XDAWN filters for one class: Σ_template v = λ Σ_signal v, leading nfilter.
inline SpatialFilterBank xdawn_fit(const dsp::Epochs& train, int target_label, Eigen::Index nfilter,
                                   const Matrix& signal_cov) {
  detail::check_nfilter(nfilter, train.channels());
  const Matrix p = evoked_template(train, target_label);
  const Matrix pc = p.colwise() - p.rowwise().mean();
  const Matrix template_cov = pc * pc.transpose() / double(std::max<Eigen::Index>(1, p.cols() - 1));
  const spd::EigenPair e = gen_eig(template_cov, signal_cov);
  Matrix v = e.eigenvectors.leftCols(nfilter);
  canonical_sign(v);
  return SpatialFilterBank{v.transpose(), signal_cov * v, e.eigenvalues.head(nfilter)};
}

inline SpatialFilterBank xdawn_fit(const dsp::Epochs& train, int target_label, Eigen::Index nfilter = 4) {
  return xdawn_fit(train, target_label, nfilter, signal_covariance(train));
}

// ------------------------------------------------------ ERP covariances

/// Super-trial covariance of [P; X]. P is the prototype (rows × samples).
inline spd::SpdMatrix erp_cov(const Matrix& trial, const Matrix& prototype) {
  require(prototype.cols() == trial.cols(), ErrorCode::DimensionMismatch,
          "prototype and trial differ in length");
  Matrix stacked(prototype.rows() + trial.rows(), trial.cols());
  stacked << prototype, trial;
  return dsp::covariance(stacked, dsp::CovEstimator::Shrunk);
}

/// Prototype compressed to its svd_n leading components: U[:, :svd_n]ᵀ P.
inline Matrix compress_prototype(const Matrix& prototype, int svd_n) {
  require(svd_n >= 1 && svd_n <= prototype.rows(), ErrorCode::InvalidHyper,
          "svd_n must be in [1, channels]");
  Eigen::JacobiSVD<Matrix> svd(prototype, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(svd_n);
  canonical_sign(u);
  return u.transpose() * prototype;
}

// -------------------------------------------------- SSVEP covariances

/// Bandpass at f ± halfwidth for each frequency, filtered copies stacked
/// vertically, shrunk covariance of the result.
inline spd::SpdMatrix ssvep_extended_cov(const Matrix& trial, double sfreq, const std::vector<double>& freqs,
                                         double halfwidth = 0.5) {
  require(!freqs.empty(), ErrorCode::InvalidInput, "no stimulation frequencies");
  require(halfwidth > 0, ErrorCode::InvalidHyper, "band halfwidth must be positive");
  const Eigen::Index n = trial.rows();
  Matrix stacked(n * Eigen::Index(freqs.size()), trial.cols());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const auto f = dsp::design_butter_bandpass(freqs[k] - halfwidth, freqs[k] + halfwidth, sfreq);
    stacked.middleRows(n * Eigen::Index(k), n) = dsp::filtfilt_rows(f, trial);
  }
  return dsp::covariance(stacked, dsp::CovEstimator::Shrunk);
}

}  // namespace eegbench::pipelines
