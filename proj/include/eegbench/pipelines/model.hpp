#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "eegbench/dsp/butterworth.hpp"
#include "eegbench/dsp/covariance.hpp"
#include "eegbench/dsp/epochs.hpp"
#include "eegbench/dsp/filtfilt.hpp"
#include "eegbench/pipelines/heads.hpp"
#include "eegbench/pipelines/riemann.hpp"
#include "eegbench/pipelines/spatial.hpp"
#include "eegbench/pipelines/ssvep.hpp"

namespace eegbench::pipelines {

/// A trained classifier over epochs. Columns of predict_proba follow classes().
class Model {
 public:
  virtual ~Model() = default;

  void fit(const dsp::Epochs& train, std::uint64_t seed) {
    train.validate();
    const auto classes = sorted_classes(train.labels);
    require(classes.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
    for (int c : classes)
      require(std::count(train.labels.begin(), train.labels.end(), c) >= 2, ErrorCode::DegenerateLabels,
              "class " + std::to_string(c) + " has fewer than two trials");
    channels_ = train.channels();
    samples_ = train.samples();
    sfreq_ = train.sfreq;
    do_fit(train, seed);
  }

  Matrix predict_proba(const dsp::Epochs& test) const {
    require(channels_ > 0, ErrorCode::InvalidInput, "model not fitted");
    require(test.channels() == channels_ && test.samples() == samples_, ErrorCode::DimensionMismatch,
            "test epochs shape differs from training");
    require(test.sfreq == sfreq_, ErrorCode::DimensionMismatch, "test sampling rate differs from training");
    return do_predict(test);
  }

  /// Predicted labels (argmax of predict_proba).
  Labels predict(const dsp::Epochs& test) const {
    const Matrix p = predict_proba(test);
    Labels out(std::size_t(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      Eigen::Index k;
      p.row(i).maxCoeff(&k);
      out[std::size_t(i)] = classes()[std::size_t(k)];
    }
    return out;
  }

  virtual const std::vector<int>& classes() const = 0;

 protected:
  virtual void do_fit(const dsp::Epochs& train, std::uint64_t seed) = 0;
  virtual Matrix do_predict(const dsp::Epochs& test) const = 0;

 private:
  Eigen::Index channels_ = 0, samples_ = 0;
  double sfreq_ = 0;
};

// ------------------------------------------------------- vector features

class VecFeatures {
 public:
  virtual ~VecFeatures() = default;
  virtual void fit(const dsp::Epochs& train) = 0;
  virtual Matrix transform(const dsp::Epochs& e) const = 0;
};

class LogVarFeatures : public VecFeatures {
 public:
  void fit(const dsp::Epochs&) override {}
  Matrix transform(const dsp::Epochs& e) const override { return logvar_features(e).features; }
};

enum class CspKind { Plain, Tikhonov };

/// CSP log-variance features. Two classes use one filter bank; more classes
/// use one bank per class against the rest, features concatenated.
class CspFeatures : public VecFeatures {
 public:
  CspFeatures(Eigen::Index nfilter, dsp::CovEstimator est, CspKind kind = CspKind::Plain, double alpha = 0)
      : nfilter_(nfilter), est_(est), kind_(kind), alpha_(alpha) {}

  void fit(const dsp::Epochs& train) override {
    const auto classes = sorted_classes(train.labels);
    banks_.clear();
    if (classes.size() == 2) {
      banks_.push_back(make(class_mean_covariance(train, classes[0], est_),
                            class_mean_covariance(train, classes[1], est_)));
      return;
    }
    for (int c : classes)
      banks_.push_back(make(class_mean_covariance(train, c, est_),
                            class_mean_covariance(train, c, est_, true)));
  }

  Matrix transform(const dsp::Epochs& e) const override {
    Matrix out(Eigen::Index(e.size()), Eigen::Index(banks_.size()) * nfilter_);
    for (std::size_t b = 0; b < banks_.size(); ++b)
      out.middleCols(Eigen::Index(b) * nfilter_, nfilter_) = filtered_logvar(banks_[b], e.data);
    return out;
  }

  const std::vector<SpatialFilterBank>& banks() const { return banks_; }

 private:
  SpatialFilterBank make(const spd::SpdMatrix& s1, const spd::SpdMatrix& s2) const {
    return kind_ == CspKind::Plain ? csp_fit(s1, s2, nfilter_) : trcsp_fit(s1, s2, nfilter_, alpha_);
  }

  Eigen::Index nfilter_;
  dsp::CovEstimator est_;
  CspKind kind_;
  double alpha_;
  std::vector<SpatialFilterBank> banks_;
};

/// Mutual information (nats) between a feature and the labels, from an
/// equal-width histogram over the feature's range.
inline double mutual_information(const Vector& feature, const Labels& y, int bins = 8) {
  const auto classes = sorted_classes(y);
  const double lo = feature.minCoeff(), hi = feature.maxCoeff();
  if (!(hi > lo)) return 0.0;
  const Eigen::Index n = feature.size();
  Matrix joint = Matrix::Zero(bins, Eigen::Index(classes.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = int((feature(i) - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    joint(b, Eigen::Index(class_index(classes, y[std::size_t(i)]))) += 1.0;
  }
  joint /= double(n);
  const Vector pb = joint.rowwise().sum();
  const Eigen::RowVectorXd pc = joint.colwise().sum();
  double mi = 0;
  for (Eigen::Index b = 0; b < joint.rows(); ++b)
    for (Eigen::Index c = 0; c < joint.cols(); ++c)
      if (joint(b, c) > 0) mi += joint(b, c) * std::log(joint(b, c) / (pb(b) * pc(c)));
  return mi;
}

using Band = std::pair<double, double>;

inline std::vector<Band> default_filter_bank() {
  std::vector<Band> bands;
  for (double lo = 8; lo < 32; lo += 4) bands.push_back({lo, lo + 4});
  return bands;
}

/// Filter-bank CSP: CSP log-variance per band, the k features with the highest
/// mutual information with the labels are kept.
class FbcspFeatures : public VecFeatures {
 public:
  FbcspFeatures(std::vector<Band> bands, Eigen::Index nfilter, std::optional<Eigen::Index> k)
      : bands_(std::move(bands)), nfilter_(nfilter), k_(k) {
    require(!bands_.empty(), ErrorCode::InvalidHyper, "filter bank is empty");
  }

  void fit(const dsp::Epochs& train) override {
    filters_.clear();
    csp_.clear();
    for (const auto& [lo, hi] : bands_) {
      filters_.push_back(dsp::design_butter_bandpass(lo, hi, train.sfreq));
      csp_.emplace_back(nfilter_, dsp::CovEstimator::Shrunk);
      csp_.back().fit(band_pass(filters_.back(), train));
    }
    const Matrix all = transform_all(train);
    const Eigen::Index total = all.cols();
    const Eigen::Index k = k_.value_or(total);
    require(k >= 1 && k <= total, ErrorCode::InvalidHyper,
            "k_features must be in [1, " + std::to_string(total) + "], got " + std::to_string(k));
    mi_.resize(total);
    for (Eigen::Index j = 0; j < total; ++j) mi_(j) = mutual_information(all.col(j), train.labels);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return mi_(a) > mi_(b); });
    ranking_ = order;
    selected_.assign(order.begin(), order.begin() + k);
    std::sort(selected_.begin(), selected_.end());
  }

  Matrix transform(const dsp::Epochs& e) const override {
    const Matrix all = transform_all(e);
    Matrix out(all.rows(), Eigen::Index(selected_.size()));
    for (std::size_t j = 0; j < selected_.size(); ++j) out.col(Eigen::Index(j)) = all.col(selected_[j]);
    return out;
  }

  /// Feature columns kept, in their original order.
  const std::vector<Eigen::Index>& selected() const { return selected_; }
  /// All feature columns by decreasing mutual information (stable on ties).
  const std::vector<Eigen::Index>& ranking() const { return ranking_; }
  const Vector& scores() const { return mi_; }
  /// Band that produced a given (pre-selection) feature column.
  std::size_t band_of(Eigen::Index column) const {
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < csp_.size(); ++b) {
      offset += Eigen::Index(csp_[b].banks().size()) * nfilter_;
      if (column < offset) return b;
    }
    fail(ErrorCode::InvalidInput, "feature column out of range");
  }

 private:
  static dsp::Epochs band_pass(const dsp::BiquadCascade& f, const dsp::Epochs& e) {
    dsp::Epochs out = e;
    for (auto& trial : out.data) trial = dsp::filtfilt_rows(f, trial);
    return out;
  }

  Matrix transform_all(const dsp::Epochs& e) const {
    std::vector<Matrix> parts;
    Eigen::Index cols = 0;
    for (std::size_t b = 0; b < bands_.size(); ++b) {
      parts.push_back(csp_[b].transform(band_pass(filters_[b], e)));
      cols += parts.back().cols();
    }
    Matrix out(Eigen::Index(e.size()), cols);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
      out.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    return out;
  }

  std::vector<Band> bands_;
  Eigen::Index nfilter_;
  std::optional<Eigen::Index> k_;
  std::vector<dsp::BiquadCascade> filters_;
  std::vector<CspFeatures> csp_;
  Vector mi_;
  std::vector<Eigen::Index> ranking_, selected_;
};

/// XDAWN filters for every class, applied to the epoch and flattened.
class XdawnFeatures : public VecFeatures {
 public:
  explicit XdawnFeatures(Eigen::Index nfilter) : nfilter_(nfilter) {}

  void fit(const dsp::Epochs& train) override {
    const Matrix signal = signal_covariance(train);
    Matrix stacked(0, train.channels());
    for (int c : sorted_classes(train.labels)) {
      const SpatialFilterBank bank = xdawn_fit(train, c, nfilter_, signal);
      Matrix grown(stacked.rows() + bank.filters.rows(), stacked.cols());
      grown << stacked, bank.filters;
      stacked = std::move(grown);
    }
    filters_ = std::move(stacked);
  }

  Matrix transform(const dsp::Epochs& e) const override {
    const Eigen::Index width = filters_.rows() * e.samples();
    Matrix out(Eigen::Index(e.size()), width);
    for (std::size_t i = 0; i < e.size(); ++i) {
      const Matrix f = filters_ * e.data[i];
      out.row(Eigen::Index(i)) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), width);
    }
    return out;
  }

 private:
  Eigen::Index nfilter_;
  Matrix filters_;
};

// ------------------------------------------------- covariance features

class CovFeatures {
 public:
  virtual ~CovFeatures() = default;
  virtual void fit(const dsp::Epochs& train) = 0;
  virtual CovSet transform(const dsp::Epochs& e) const = 0;
};

class PlainCov : public CovFeatures {
 public:
  explicit PlainCov(dsp::CovEstimator est = dsp::CovEstimator::Shrunk) : est_(est) {}
  void fit(const dsp::Epochs&) override {}
  CovSet transform(const dsp::Epochs& e) const override {
    CovSet out;
    out.reserve(e.size());
    for (const auto& t : e.data) out.push_back(dsp::covariance(t, est_));
    return out;
  }

 private:
  dsp::CovEstimator est_;
};

class AugmentedCov : public CovFeatures {
 public:
  AugmentedCov(int order, int lag) : order_(order), lag_(lag) {
    require(order >= 1 && lag >= 1, ErrorCode::InvalidHyper, "order and lag must be >= 1");
  }
  void fit(const dsp::Epochs&) override {}
  CovSet transform(const dsp::Epochs& e) const override {
    CovSet out;
    out.reserve(e.size());
    for (const auto& t : e.data) out.push_back(dsp::augmented_covariance(t, order_, lag_));
    return out;
  }

 private:
  int order_, lag_;
};

/// Per-class XDAWN prototypes stacked over the XDAWN-filtered trial.
class XdawnCov : public CovFeatures {
 public:
  explicit XdawnCov(Eigen::Index nfilter) : nfilter_(nfilter) {}

  void fit(const dsp::Epochs& train) override {
    const Matrix signal = signal_covariance(train);
    const auto classes = sorted_classes(train.labels);
    const Eigen::Index rows = nfilter_ * Eigen::Index(classes.size());
    filters_.resize(rows, train.channels());
    prototype_.resize(rows, train.samples());
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const SpatialFilterBank bank = xdawn_fit(train, classes[k], nfilter_, signal);
      filters_.middleRows(Eigen::Index(k) * nfilter_, nfilter_) = bank.filters;
      prototype_.middleRows(Eigen::Index(k) * nfilter_, nfilter_) = bank.filters * evoked_template(train, classes[k]);
    }
  }

  CovSet transform(const dsp::Epochs& e) const override {
    CovSet out;
    out.reserve(e.size());
    for (const auto& t : e.data) out.push_back(erp_cov(filters_ * t, prototype_));
    return out;
  }

 private:
  Eigen::Index nfilter_;
  Matrix filters_, prototype_;
};

/// Target-class evoked template stacked over the raw trial, optionally
/// compressed to svd_n components. The target is the largest label.
class ErpCov : public CovFeatures {
 public:
  explicit ErpCov(std::optional<int> svd_n = std::nullopt) : svd_n_(svd_n) {}

  void fit(const dsp::Epochs& train) override {
    const int target = sorted_classes(train.labels).back();
    prototype_ = evoked_template(train, target);
    if (svd_n_) prototype_ = compress_prototype(prototype_, *svd_n_);
  }

  CovSet transform(const dsp::Epochs& e) const override {
    CovSet out;
    out.reserve(e.size());
    for (const auto& t : e.data) out.push_back(erp_cov(t, prototype_));
    return out;
  }

 private:
  std::optional<int> svd_n_;
  Matrix prototype_;
};

/// Covariance of the trial bandpassed around each stimulation frequency.
class SsvepCov : public CovFeatures {
 public:
  explicit SsvepCov(double halfwidth) : halfwidth_(halfwidth) {}

  void fit(const dsp::Epochs& train) override {
    freqs_ = ssvep_frequencies(train, sorted_classes(train.labels));
    sfreq_ = train.sfreq;
  }

  CovSet transform(const dsp::Epochs& e) const override {
    CovSet out;
    out.reserve(e.size());
    for (const auto& t : e.data) out.push_back(ssvep_extended_cov(t, sfreq_, freqs_, halfwidth_));
    return out;
  }

 private:
  double halfwidth_;
  double sfreq_ = 0;
  std::vector<double> freqs_;
};

/// Tangent-space vectors at the Fréchet mean of the training covariances.
class TangentFeatures : public VecFeatures {
 public:
  explicit TangentFeatures(std::unique_ptr<CovFeatures> cov) : cov_(std::move(cov)) {}

  void fit(const dsp::Epochs& train) override {
    cov_->fit(train);
    ts_.fit(cov_->transform(train));
  }
  Matrix transform(const dsp::Epochs& e) const override { return ts_.transform(cov_->transform(e)); }
  const TangentSpace& tangent_space() const { return ts_; }

 private:
  std::unique_ptr<CovFeatures> cov_;
  TangentSpace ts_;
};

// ----------------------------------------------------------- models

class VecModel : public Model {
 public:
  VecModel(std::unique_ptr<VecFeatures> features, BinaryFactory head)
      : features_(std::move(features)), head_(std::move(head)) {}

  const std::vector<int>& classes() const override { return head_.classes(); }
  const VecFeatures& features() const { return *features_; }
  const VecClassifier& head() const { return head_; }

 protected:
  void do_fit(const dsp::Epochs& train, std::uint64_t seed) override {
    features_->fit(train);
    head_.fit(features_->transform(train), train.labels, seed);
  }
  Matrix do_predict(const dsp::Epochs& test) const override {
    return head_.predict_proba(features_->transform(test));
  }

 private:
  std::unique_ptr<VecFeatures> features_;
  VecClassifier head_;
};

/// MDM, or FgMDM when `geodesic_filter` is set, over a covariance stage.
class CovModel : public Model {
 public:
  CovModel(std::unique_ptr<CovFeatures> cov, bool geodesic_filter)
      : cov_(std::move(cov)), fg_(geodesic_filter) {}

  const std::vector<int>& classes() const override { return fg_ ? fgmdm_.classes() : mdm_.classes(); }
  const Mdm& mdm() const { return mdm_; }
  const FgMdm& fgmdm() const { return fgmdm_; }

 protected:
  void do_fit(const dsp::Epochs& train, std::uint64_t) override {
    cov_->fit(train);
    const CovSet covs = cov_->transform(train);
    if (fg_) fgmdm_.fit(covs, train.labels);
    else mdm_.fit(covs, train.labels);
  }
  Matrix do_predict(const dsp::Epochs& test) const override {
    const CovSet covs = cov_->transform(test);
    return fg_ ? fgmdm_.predict_proba(covs) : mdm_.predict_proba(covs);
  }

 private:
  std::unique_ptr<CovFeatures> cov_;
  bool fg_;
  Mdm mdm_;
  FgMdm fgmdm_;
};

class CcaModel : public Model {
 public:
  explicit CcaModel(int n_harmonics) : harmonics_(n_harmonics) {}
  const std::vector<int>& classes() const override { return classes_; }

 protected:
  void do_fit(const dsp::Epochs& train, std::uint64_t) override {
    classes_ = sorted_classes(train.labels);
    detector_.emplace(ssvep_frequencies(train, classes_), classes_, train.sfreq, harmonics_);
  }
  Matrix do_predict(const dsp::Epochs& test) const override { return detector_->predict_proba(test.data); }

 private:
  int harmonics_;
  std::vector<int> classes_;
  std::optional<CcaDetector> detector_;
};

class TrcaModel : public Model {
 public:
  const std::vector<int>& classes() const override { return trca_.classes(); }

 protected:
  void do_fit(const dsp::Epochs& train, std::uint64_t) override { trca_.fit(train); }
  Matrix do_predict(const dsp::Epochs& test) const override { return trca_.predict_proba(test.data); }

 private:
  Trca trca_;
};

}  // namespace eegbench::pipelines
