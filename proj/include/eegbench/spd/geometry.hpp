#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "eegbench/spd/matrix.hpp"

namespace eegbench::spd {

/// Symmetric eigendecomposition, eigenvalues descending.
inline EigenPair sym_eig(const SymMatrix& m) { return sym_eig_unchecked(m.values()); }

inline EigenPair sym_eig(const Matrix& m) { return sym_eig(SymMatrix(m)); }

enum class MatrixFn { Log, Exp, Sqrt, InvSqrt };

namespace detail {

template <typename F>
Matrix apply_spectral(const EigenPair& e, F&& f) {
  Vector mapped = e.eigenvalues.unaryExpr(std::forward<F>(f));
  return symmetrize(e.eigenvectors * mapped.asDiagonal() * e.eigenvectors.transpose());
}

inline void require_positive_spectrum(const EigenPair& e) {
  const double floor = kSpdRelativeFloor * e.eigenvalues(0);
  if (!(e.eigenvalues(e.eigenvalues.size() - 1) > floor)) {
    fail(ErrorCode::NotPositiveDefinite, "eigenvalue below SPD floor");
  }
}

}  // namespace detail

inline SymMatrix logm(const SpdMatrix& p) {
  detail::require_positive_spectrum(p.eig());
  return SymMatrix(detail::apply_spectral(p.eig(), [](double v) { return std::log(v); }));
}

inline SpdMatrix sqrtm(const SpdMatrix& p) {
  EigenPair e = p.eig();
  e.eigenvalues = e.eigenvalues.cwiseSqrt();
  return SpdMatrix::from_eigen(std::move(e));
}

inline SpdMatrix invsqrtm(const SpdMatrix& p) {
  detail::require_positive_spectrum(p.eig());
  EigenPair e = p.eig();
  // Reverse so the eigenvalues stay descending.
  const Eigen::Index n = p.dim();
  EigenPair out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = 1.0 / std::sqrt(e.eigenvalues(n - 1 - k));
    out.eigenvectors.col(k) = e.eigenvectors.col(n - 1 - k);
  }
  return SpdMatrix::from_eigen(std::move(out));
}

inline SpdMatrix expm(const SymMatrix& s) {
  EigenPair e = sym_eig(s);
  e.eigenvalues = e.eigenvalues.array().exp().matrix();
  return SpdMatrix::from_eigen(std::move(e));
}

inline SpdMatrix inverse(const SpdMatrix& p) {
  const Eigen::Index n = p.dim();
  EigenPair out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = 1.0 / p.eig().eigenvalues(n - 1 - k);
    out.eigenvectors.col(k) = p.eig().eigenvectors.col(n - 1 - k);
  }
  return SpdMatrix::from_eigen(std::move(out));
}

/// Generic dispatcher over the four spectral functions. Log returns a symmetric
/// (not necessarily positive) matrix; the others return SPD matrices.
inline Matrix matrix_fn(const SpdMatrix& p, MatrixFn fn) {
  switch (fn) {
    case MatrixFn::Log: return logm(p).values();
    case MatrixFn::Exp: return expm(p.as_sym()).values();
    case MatrixFn::Sqrt: return sqrtm(p).values();
    case MatrixFn::InvSqrt: return invsqrtm(p).values();
  }
  return {};
}

/// Wᵀ P W for an invertible W.
inline SpdMatrix congruence(const SpdMatrix& p, const Matrix& w) {
  require(w.rows() == p.dim(), ErrorCode::DimensionMismatch, "congruence dimension mismatch");
  return SpdMatrix(symmetrize(w.transpose() * p.values() * w));
}

/// Sandwich A M A for symmetric A and M, symmetrized.
inline Matrix sandwich(const Matrix& a, const Matrix& m) { return symmetrize(a * m * a); }

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
  require(a == b, ErrorCode::DimensionMismatch,
          "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

/// Affine-invariant distance: sqrt(Σ log² λ_i(P1^{-1/2} P2 P1^{-1/2})).
inline double airm_distance(const SpdMatrix& p1, const SpdMatrix& p2) {
  require_same_dim(p1.dim(), p2.dim());
  const Matrix isqrt = invsqrtm(p1).values();
  const Matrix whitened = sandwich(isqrt, p2.values());
  const Vector lambda = sym_eig_unchecked(whitened).eigenvalues;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    require(lambda(i) > 0.0, ErrorCode::NotPositiveDefinite, "non-positive relative eigenvalue");
    const double l = std::log(lambda(i));
    acc += l * l;
  }
  return std::sqrt(acc);
}

/// Exp_base(S) = base^{1/2} exp(base^{-1/2} S base^{-1/2}) base^{1/2}.
inline SpdMatrix exp_map(const SpdMatrix& base, const SymMatrix& s) {
  require_same_dim(base.dim(), s.dim());
  const Matrix root = sqrtm(base).values();
  const Matrix isqrt = invsqrtm(base).values();
  const SpdMatrix inner = expm(SymMatrix(sandwich(isqrt, s.values())));
  return SpdMatrix(sandwich(root, inner.values()));
}

/// Log_base(P) = base^{1/2} log(base^{-1/2} P base^{-1/2}) base^{1/2}.
inline SymMatrix log_map(const SpdMatrix& base, const SpdMatrix& p) {
  require_same_dim(base.dim(), p.dim());
  const Matrix root = sqrtm(base).values();
  const Matrix isqrt = invsqrtm(base).values();
  const SymMatrix inner = logm(SpdMatrix(sandwich(isqrt, p.values())));
  return SymMatrix(sandwich(root, inner.values()));
}

/// Upper-triangle half-vectorization with √2 on off-diagonal entries, so the
/// Euclidean norm equals the Frobenius norm.
inline Vector half_vectorize(const Matrix& s) {
  const Eigen::Index n = s.rows();
  Vector out(tangent_length(n));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out(k++) = s(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) out(k++) = std::numbers::sqrt2 * s(i, j);
  }
  return out;
}

inline Matrix half_unvectorize(const Vector& v) {
  const Eigen::Index n = dim_from_tangent_length(v.size());
  Matrix s(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = v(k++);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s(i, j) = s(j, i) = v(k++) / std::numbers::sqrt2;
    }
  }
  return s;
}

/// Tangent-space coordinates of p at base: half-vectorization of
/// log(base^{-1/2} p base^{-1/2}), i.e. the log map whitened by base.
/// Its norm equals airm_distance(base, p).
inline TangentVector tangent_vectorize(const SpdMatrix& base, const SpdMatrix& p) {
  require_same_dim(base.dim(), p.dim());
  const Matrix isqrt = invsqrtm(base).values();
  const SymMatrix inner = logm(SpdMatrix(sandwich(isqrt, p.values())));
  return TangentVector{base.dim(), half_vectorize(inner.values())};
}

/// Inverse of tangent_vectorize.
inline SpdMatrix tangent_unvectorize(const SpdMatrix& base, const TangentVector& t) {
  require_same_dim(base.dim(), t.base_dim);
  require(t.values.size() == tangent_length(t.base_dim), ErrorCode::DimensionMismatch,
          "tangent vector length mismatch");
  const Matrix root = sqrtm(base).values();
  const SpdMatrix inner = expm(SymMatrix(half_unvectorize(t.values)));
  return SpdMatrix(sandwich(root, inner.values()));
}

/// Batched variant sharing one whitening of the base point.
class TangentProjector {
 public:
  explicit TangentProjector(const SpdMatrix& base)
      : base_(base), root_(sqrtm(base).values()), isqrt_(invsqrtm(base).values()) {}

  const SpdMatrix& base() const { return base_; }

  Vector vectorize(const SpdMatrix& p) const {
    require_same_dim(base_.dim(), p.dim());
    return half_vectorize(logm(SpdMatrix(sandwich(isqrt_, p.values()))).values());
  }

  SpdMatrix unvectorize(const Vector& v) const {
    const SpdMatrix inner = expm(SymMatrix(half_unvectorize(v)));
    return SpdMatrix(sandwich(root_, inner.values()));
  }

 private:
  SpdMatrix base_;
  Matrix root_;
  Matrix isqrt_;
};

struct FrechetOptions {
  double tol = 1e-8;
  int max_iter = 50;
};

/// Raised when the Karcher flow does not reach tolerance; carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(SpdMatrix last, double residual, int iterations)
      : Error(ErrorCode::NonConvergence,
              "Karcher flow stopped after " + std::to_string(iterations) +
                  " iterations with residual " + std::to_string(residual)),
        last_(std::move(last)),
        residual_(residual) {}

  const SpdMatrix& last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  SpdMatrix last_;
  double residual_;
};

struct FrechetResult {
  SpdMatrix mean;
  double residual = 0.0;
  int iterations = 0;
};

/// Karcher flow from the arithmetic mean, starting at unit step. Stops when
/// the Frobenius norm of the whitened tangent mean drops below tol. A step
/// that increases the residual is undone and retried at half length, and the
/// step shrinks while contraction is slow (an oscillating flow) so widely
/// spread sets still converge. Tight sets keep the unit step throughout.
inline FrechetResult frechet_mean_detailed(std::span<const SpdMatrix> set,
                                           const FrechetOptions& options = {}) {
  require(!set.empty(), ErrorCode::InvalidInput, "Frechet mean of an empty set");
  require(options.tol > 0.0, ErrorCode::InvalidInput, "tolerance must be positive");
  const Eigen::Index n = set.front().dim();
  Matrix arithmetic = Matrix::Zero(n, n);
  for (const auto& p : set) {
    require_same_dim(n, p.dim());
    arithmetic += p.values();
  }
  arithmetic /= static_cast<double>(set.size());
  SpdMatrix g(symmetrize(arithmetic));

  auto tangent_mean = [&](const SpdMatrix& at) {
    const Matrix isqrt = invsqrtm(at).values();
    Matrix step = Matrix::Zero(n, n);
    for (const auto& p : set) step += logm(SpdMatrix(sandwich(isqrt, p.values()))).values();
    return Matrix(step / static_cast<double>(set.size()));
  };

  Matrix step = tangent_mean(g);
  double residual = step.norm();
  double nu = 1.0;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    if (residual < options.tol) return FrechetResult{std::move(g), residual, iter};
    if (iter == options.max_iter) break;
    const Matrix root = sqrtm(g).values();
    SpdMatrix next(sandwich(root, expm(SymMatrix(symmetrize(nu * step))).values()));
    Matrix next_step = tangent_mean(next);
    const double next_residual = next_step.norm();
    if (next_residual > residual && nu > 1e-3) {
      nu *= 0.5;
      continue;
    }
    // Slow contraction at a given step means the flow overshoots along a
    // strongly curved direction; damp it. Fast contraction restores the step.
    const double ratio = next_residual / residual;
    if (ratio > 0.5) nu = std::max(0.1, 0.7 * nu);
    else if (ratio < 0.1) nu = std::min(1.0, 1.25 * nu);
    g = std::move(next);
    step = std::move(next_step);
    residual = next_residual;
  }
  throw NonConvergenceError(std::move(g), residual, options.max_iter);
}

inline SpdMatrix frechet_mean(std::span<const SpdMatrix> set, const FrechetOptions& options = {}) {
  return frechet_mean_detailed(set, options).mean;
}

inline SpdMatrix frechet_mean(std::span<const SpdMatrix> set, double tol, int max_iter) {
  return frechet_mean(set, FrechetOptions{tol, max_iter});
}

}  // namespace eegbench::spd
