#pragma once

#include <Eigen/Dense>

#include <algorithm>

#include "eegbench/spd/matrix.hpp"

namespace eegbench::dsp {

enum class CovEstimator { Scm, Shrunk };

namespace detail {

inline Eigen::MatrixXd centered(const Eigen::MatrixXd& x) {
  return x.colwise() - x.rowwise().mean();
}

}  // namespace detail

/// Ledoit-Wolf shrinkage intensity for centered data (features × samples),
/// computed against the biased sample covariance. Uses the Gram matrix when
/// there are more features than samples.
inline double ledoit_wolf_gamma(const Eigen::MatrixXd& xc) {
  const double n_samples = double(xc.cols());
  const double n_features = double(xc.rows());
  const Eigen::VectorXd var = xc.array().square().rowwise().sum().matrix() / n_samples;
  const double mu = var.sum() / n_features;
  // Σ_t ‖x_t‖⁴ equals the sum of all entries of (X∘X)(X∘X)ᵀ.
  const double beta_raw = xc.array().square().colwise().sum().matrix().squaredNorm();
  const double gram_sq = xc.rows() <= xc.cols() ? (xc * xc.transpose()).squaredNorm()
                                                : (xc.transpose() * xc).squaredNorm();
  const double delta_raw = gram_sq / (n_samples * n_samples);
  double beta = (beta_raw / n_samples - delta_raw) / (n_features * n_samples);
  double delta = (delta_raw - 2.0 * mu * var.sum() + n_features * mu * mu) / n_features;
  beta = std::min(beta, delta);
  if (!(delta > 0.0)) return 1.0;
  return std::clamp(beta / delta, 0.0, 1.0);
}

/// Sample covariance X Xᵀ/(T−1) after per-channel mean removal (not validated as SPD).
inline Eigen::MatrixXd scm(const Eigen::MatrixXd& trial) {
  require(trial.cols() >= 2, ErrorCode::SignalTooShort, "covariance needs at least 2 samples");
  require(trial.allFinite(), ErrorCode::InvalidInput, "non-finite samples");
  const Eigen::MatrixXd xc = detail::centered(trial);
  return spd::symmetrize(xc * xc.transpose() / double(trial.cols() - 1));
}

/// (1−γ)·SCM + γ·(tr/n)·I. γ is floored so the result always clears the SPD
/// eigenvalue floor, even for rank-deficient input.
inline Eigen::MatrixXd shrunk_covariance(const Eigen::MatrixXd& trial) {
  const Eigen::MatrixXd s = scm(trial);
  const Eigen::Index n = s.rows();
  const double mu = s.trace() / double(n);
  if (!(mu > 0.0)) return 1e-12 * Eigen::MatrixXd::Identity(n, n);
  double gamma = ledoit_wolf_gamma(detail::centered(trial));
  gamma = std::clamp(gamma, std::min(1.0, 1e-9 * double(n)), 1.0);
  Eigen::MatrixXd out = (1.0 - gamma) * s;
  out.diagonal().array() += gamma * mu;
  return out;
}

inline spd::SpdMatrix covariance(const Eigen::MatrixXd& trial, CovEstimator estimator) {
  return spd::SpdMatrix(estimator == CovEstimator::Scm ? scm(trial) : shrunk_covariance(trial));
}

/// Delay embedding [X(t); X(t−lag); …; X(t−(order−1)·lag)] over the valid overlap.
inline Eigen::MatrixXd delay_embed(const Eigen::MatrixXd& trial, int order, int lag) {
  require(order >= 1 && lag >= 1, ErrorCode::InvalidEmbedding, "order and lag must be >= 1");
  const Eigen::Index span = Eigen::Index(order - 1) * lag;
  require(trial.cols() > span + 1, ErrorCode::InvalidEmbedding,
          "window too short for order " + std::to_string(order) + " lag " + std::to_string(lag));
  const Eigen::Index n = trial.rows(), len = trial.cols() - span;
  Eigen::MatrixXd out(n * order, len);
  for (int k = 0; k < order; ++k)
    out.middleRows(n * k, n) = trial.middleCols(span - Eigen::Index(k) * lag, len);
  return out;
}

inline spd::SpdMatrix augmented_covariance(const Eigen::MatrixXd& trial, int order, int lag) {
  return covariance(delay_embed(trial, order, lag), CovEstimator::Shrunk);
}

}  // namespace eegbench::dsp
