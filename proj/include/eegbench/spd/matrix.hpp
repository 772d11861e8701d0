#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>

#include "eegbench/core/error.hpp"

namespace eegbench::spd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues sorted descending, eigenvectors as matching orthonormal columns.
struct EigenPair {
  Vector eigenvalues;
  Matrix eigenvectors;
};

inline constexpr double kSymmetryTolerance = 1e-12;
/// Relative floor: an SPD matrix must have every eigenvalue above this times its largest.
inline constexpr double kSpdRelativeFloor = 1e-10;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline EigenPair sym_eig_unchecked(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(ErrorCode::InvalidInput, "eigensolver failed");
  const Eigen::Index n = m.rows();
  EigenPair out{Vector(n), Matrix(n, n)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

/// Dense symmetric matrix. Construction checks symmetry and stores the exact
/// symmetric part.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& values) {
    require(values.rows() == values.cols() && values.rows() > 0, ErrorCode::DimensionMismatch,
            "symmetric matrix must be square and non-empty");
    require(all_finite(values), ErrorCode::InvalidInput, "non-finite entries");
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
    require(asym <= kSymmetryTolerance * scale, ErrorCode::InvalidInput,
            "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
    values_ = symmetrize(values);
  }

  static SymMatrix zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }

  Eigen::Index dim() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  Matrix values_;
};

/// Symmetric positive-definite matrix. The eigendecomposition computed to
/// validate it is kept, so matrix functions do not refactor.
class SpdMatrix {
 public:
  SpdMatrix() = default;

  explicit SpdMatrix(const Matrix& values) : SpdMatrix(SymMatrix(values)) {}

  explicit SpdMatrix(const SymMatrix& sym) : values_(sym.values()) {
    eig_ = sym_eig_unchecked(values_);
    validate();
  }

  /// Builds V diag(λ) Vᵀ from an already orthonormal basis.
  static SpdMatrix from_eigen(EigenPair eig) {
    SpdMatrix out;
    out.values_ = symmetrize(eig.eigenvectors * eig.eigenvalues.asDiagonal() *
                             eig.eigenvectors.transpose());
    out.eig_ = std::move(eig);
    out.validate();
    return out;
  }

  static SpdMatrix identity(Eigen::Index n) {
    return from_eigen(EigenPair{Vector::Ones(n), Matrix::Identity(n, n)});
  }

  Eigen::Index dim() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  const EigenPair& eig() const { return eig_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  SymMatrix as_sym() const { return SymMatrix(values_); }

 private:
  void validate() const {
    require(dim() > 0, ErrorCode::DimensionMismatch, "empty SPD matrix");
    const double largest = eig_.eigenvalues(0);
    const double smallest = eig_.eigenvalues(dim() - 1);
    if (!(largest > 0.0) || !(smallest > kSpdRelativeFloor * largest)) {
      fail(ErrorCode::NotPositiveDefinite,
           "eigenvalue floor violated (min " + std::to_string(smallest) + ", max " +
               std::to_string(largest) + ")");
    }
  }

  Matrix values_;
  EigenPair eig_;
};

/// Half-vectorization of a symmetric matrix: upper triangle row-major, n(n+1)/2 entries.
struct TangentVector {
  Eigen::Index base_dim = 0;
  Vector values;
};

constexpr Eigen::Index tangent_length(Eigen::Index n) { return n * (n + 1) / 2; }

inline Eigen::Index dim_from_tangent_length(Eigen::Index len) {
  const auto n = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * double(len) + 1.0) - 1.0) / 2.0));
  require(tangent_length(n) == len, ErrorCode::DimensionMismatch,
          "length is not triangular: " + std::to_string(len));
  return n;
}

}  // namespace eegbench::spd
