#pragma once

#include <Eigen/Dense>

#include <vector>

#include "eegbench/pipelines/linalg.hpp"
#include "eegbench/spd/geometry.hpp"

namespace eegbench::pipelines {

using CovSet = std::vector<spd::SpdMatrix>;

/// Tangent-space embedding at the Fréchet mean of the training set.
class TangentSpace {
 public:
  void fit(const CovSet& covs) { projector_.emplace(spd::frechet_mean(covs)); }

  Matrix transform(const CovSet& covs) const {
    require(projector_.has_value(), ErrorCode::InvalidInput, "tangent space not fitted");
    const Eigen::Index d = spd::tangent_length(projector_->base().dim());
    Matrix out(Eigen::Index(covs.size()), d);
    for (std::size_t i = 0; i < covs.size(); ++i) out.row(Eigen::Index(i)) = projector_->vectorize(covs[i]);
    return out;
  }

  spd::SpdMatrix inverse(const Vector& v) const { return projector_->unvectorize(v); }
  const spd::SpdMatrix& reference() const { return projector_->base(); }

 private:
  std::optional<spd::TangentProjector> projector_;
};

/// Minimum distance to the per-class Fréchet means; P = softmax(−δ_R).
class Mdm {
 public:
  void fit(const CovSet& covs, const Labels& y) {
    require(covs.size() == y.size(), ErrorCode::DimensionMismatch, "covariances and labels differ in length");
    classes_ = sorted_classes(y);
    require(classes_.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
    means_.clear();
    for (int c : classes_) {
      CovSet members;
      for (std::size_t i = 0; i < covs.size(); ++i)
        if (y[i] == c) members.push_back(covs[i]);
      means_.push_back(spd::frechet_mean(members));
    }
  }

  Matrix distances(const CovSet& covs) const {
    Matrix d(Eigen::Index(covs.size()), Eigen::Index(means_.size()));
    for (std::size_t i = 0; i < covs.size(); ++i)
      for (std::size_t k = 0; k < means_.size(); ++k)
        d(Eigen::Index(i), Eigen::Index(k)) = spd::airm_distance(means_[k], covs[i]);
    return d;
  }

  Matrix predict_proba(const CovSet& covs) const { return softmax_rows(-distances(covs)); }

  const std::vector<int>& classes() const { return classes_; }
  const CovSet& means() const { return means_; }

 private:
  std::vector<int> classes_;
  CovSet means_;
};

/// Geodesic filtering: tangent vectors at the grand mean are projected onto
/// the (classes − 1)-dimensional shrinkage-LDA subspace and mapped back.
class GeodesicFilter {
 public:
  void fit(const CovSet& covs, const Labels& y) {
    ts_.fit(covs);
    const Matrix t = ts_.transform(covs);
    const auto classes = sorted_classes(y);
    require(classes.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
    const Eigen::Index n = t.rows(), d = t.cols(), k = Eigen::Index(classes.size());
    Matrix means = Matrix::Zero(k, d);
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = Eigen::Index(class_index(classes, y[size_t(i)]));
      means.row(c) += t.row(i);
      counts(c) += 1;
    }
    for (Eigen::Index c = 0; c < k; ++c) means.row(c) /= counts(c);
    Matrix z(n, d);
    for (Eigen::Index i = 0; i < n; ++i) z.row(i) = t.row(i) - means.row(Eigen::Index(class_index(classes, y[size_t(i)])));
    const RegularizedCovariance sw(std::move(z), std::max(1.0, double(n - k)), true);
    const Eigen::RowVectorXd grand = t.colwise().mean();
    Matrix between(d, k);
    for (Eigen::Index c = 0; c < k; ++c) between.col(c) = (means.row(c) - grand).transpose();
    // Discriminant directions Σ_w⁻¹(μ_c − μ) span the (k−1)-dim LDA subspace.
    const Matrix dirs = sw.solve(between);
    Eigen::JacobiSVD<Matrix> svd(dirs, Eigen::ComputeThinU);
    basis_ = svd.matrixU().leftCols(std::min<Eigen::Index>(k - 1, d));
  }

  Eigen::Index rank() const { return basis_.cols(); }

  Matrix project(const Matrix& t) const { return t * basis_ * basis_.transpose(); }

  CovSet transform(const CovSet& covs) const {
    const Matrix t = project(ts_.transform(covs));
    CovSet out;
    out.reserve(covs.size());
    for (Eigen::Index i = 0; i < t.rows(); ++i) out.push_back(ts_.inverse(t.row(i).transpose()));
    return out;
  }

  const TangentSpace& tangent_space() const { return ts_; }

 private:
  TangentSpace ts_;
  Matrix basis_;  // d × (classes − 1), orthonormal columns
};

class FgMdm {
 public:
  void fit(const CovSet& covs, const Labels& y) {
    filter_.fit(covs, y);
    mdm_.fit(filter_.transform(covs), y);
  }
  Matrix predict_proba(const CovSet& covs) const { return mdm_.predict_proba(filter_.transform(covs)); }
  const std::vector<int>& classes() const { return mdm_.classes(); }
  const GeodesicFilter& filter() const { return filter_; }

 private:
  GeodesicFilter filter_;
  Mdm mdm_;
};

}  // namespace eegbench::pipelines
