#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <limits>
#include <vector>

#include "eegbench/dsp/covariance.hpp"
#include "eegbench/spd/geometry.hpp"

namespace eegbench::pipelines {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Solves (A v = λ B v) for symmetric A and SPD B by whitening with B^{-1/2}.
/// Eigenvalues descending; eigenvector columns satisfy Vᵀ B V = I.
inline spd::EigenPair gen_eig(const Matrix& a, const Matrix& b) {
  const spd::SpdMatrix bs(spd::symmetrize(b));
  const Matrix w = spd::invsqrtm(bs).values();
  spd::EigenPair e = spd::sym_eig_unchecked(spd::sandwich(w, spd::symmetrize(a)));
  e.eigenvectors = w * e.eigenvectors;
  return e;
}

/// Same as gen_eig but B may be only positive semi-definite: eigenvalues of B
/// below `rel_floor`·max are lifted to that floor before whitening.
inline spd::EigenPair gen_eig_floored(const Matrix& a, const Matrix& b, double rel_floor = 1e-10) {
  spd::EigenPair eb = spd::sym_eig_unchecked(spd::symmetrize(b));
  const double top = std::max(eb.eigenvalues(0), std::numeric_limits<double>::min());
  const Vector inv_sqrt =
      eb.eigenvalues.unaryExpr([&](double v) { return 1.0 / std::sqrt(std::max(v, rel_floor * top)); });
  const Matrix w = eb.eigenvectors * inv_sqrt.asDiagonal() * eb.eigenvectors.transpose();
  spd::EigenPair e = spd::sym_eig_unchecked(spd::sandwich(w, spd::symmetrize(a)));
  e.eigenvectors = w * e.eigenvectors;
  return e;
}

/// Sign convention for filters: largest-magnitude entry positive.
inline void canonical_sign(Matrix& columns) {
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    Eigen::Index idx;
    columns.col(k).cwiseAbs().maxCoeff(&idx);
    if (columns(idx, k) < 0) columns.col(k) *= -1.0;
  }
}

/// Covariance Σ = (1−γ)·ZᵀZ/dof + γ·μ·I built from centered sample rows Z
/// (n × d), with linear solves that switch to the Woodbury identity when d > n
/// so wide feature vectors never need a d×d factorization.
class RegularizedCovariance {
 public:
  /// Without `shrink`, γ = 0 and a singular estimate raises SingularCovariance.
  RegularizedCovariance(Matrix z, double dof, bool shrink) : z_(std::move(z)), dof_(dof) {
    require(dof_ > 0, ErrorCode::SingularCovariance, "not enough samples for a covariance");
    const double trace = z_.squaredNorm() / dof_;
    mu_ = trace / double(z_.cols());
    if (!(mu_ > 0)) fail(ErrorCode::SingularCovariance, "zero within-class scatter");
    gamma_ = 0.0;
    if (shrink) {
      gamma_ = dsp::ledoit_wolf_gamma(z_.transpose());
      gamma_ = std::clamp(gamma_, std::min(1.0, 1e-9 * double(z_.cols())), 1.0);
    }
    const Eigen::Index n = z_.rows(), d = z_.cols();
    woodbury_ = gamma_ > 0 && d > n;
    if (woodbury_) {
      const double a = gamma_ * mu_, b = (1.0 - gamma_) / dof_;
      if (b > 0) inner_llt_.compute(Matrix::Identity(n, n) * (a / b) + z_ * z_.transpose());
    } else {
      Matrix s = (1.0 - gamma_) * (z_.transpose() * z_) / dof_;
      s.diagonal().array() += gamma_ * mu_;
      s = spd::symmetrize(s);
      const spd::EigenPair e = spd::sym_eig_unchecked(s);
      if (!(e.eigenvalues(d - 1) > 1e-10 * e.eigenvalues(0)))
        fail(ErrorCode::SingularCovariance, "pooled covariance is singular");
      full_ = s;
      full_llt_.compute(full_);
    }
  }

  double gamma() const { return gamma_; }

  Matrix dense() const {
    Matrix s = (1.0 - gamma_) * (z_.transpose() * z_) / dof_;
    s.diagonal().array() += gamma_ * mu_;
    return spd::symmetrize(s);
  }

  Matrix solve(const Matrix& rhs) const {
    if (!woodbury_) return full_llt_.solve(rhs);
    const double a = gamma_ * mu_, b = (1.0 - gamma_) / dof_;
    if (b == 0) return rhs / a;
    // (aI + b ZᵀZ)⁻¹ = (1/a)·[I − Zᵀ (a/b·I + ZZᵀ)⁻¹ Z]
    return (rhs - z_.transpose() * inner_llt_.solve(z_ * rhs)) / a;
  }

 private:
  Matrix z_;
  double dof_;
  double mu_ = 0;
  double gamma_ = 0;
  bool woodbury_ = false;
  Matrix full_;
  Eigen::LLT<Matrix> inner_llt_, full_llt_;
};

inline std::vector<int> sorted_classes(const Labels& y) {
  std::vector<int> c(y.begin(), y.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

inline std::size_t class_index(const std::vector<int>& classes, int label) {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  require(it != classes.end() && *it == label, ErrorCode::InvalidInput, "label not seen in training");
  return static_cast<std::size_t>(it - classes.begin());
}

/// Row-wise softmax with temperature 1.
inline Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    Eigen::RowVectorXd e = (scores.row(i).array() - m).exp().matrix();
    out.row(i) = e / e.sum();
  }
  return out;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace eegbench::pipelines
