#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "eegbench/core/random.hpp"
#include "eegbench/pipelines/linalg.hpp"

namespace eegbench::pipelines {

/// Per-feature z-scoring learned on training rows; constant features keep scale 1.
struct Standardizer {
  Eigen::RowVectorXd mean, scale;

  void fit(const Matrix& x) {
    mean = x.colwise().mean();
    const Matrix c = x.rowwise() - mean;
    scale = (c.array().square().colwise().sum() / double(std::max<Eigen::Index>(1, x.rows()))).sqrt();
    for (Eigen::Index j = 0; j < scale.size(); ++j)
      if (!(scale(j) > 1e-12)) scale(j) = 1.0;
  }

  Matrix transform(const Matrix& x) const {
    require(x.cols() == mean.size(), ErrorCode::DimensionMismatch, "feature count differs from training");
    return (x.rowwise() - mean).array().rowwise() / scale.array();
  }
};

inline void require_finite(const Matrix& x) {
  require(x.allFinite(), ErrorCode::InvalidInput, "non-finite features");
}

/// Two-class scorer on labels {0,1}; proba() is P(label 1).
class BinaryHead {
 public:
  virtual ~BinaryHead() = default;
  virtual void fit(const Matrix& x, const Labels& y01, std::uint64_t seed) = 0;
  virtual Vector decision(const Matrix& x) const = 0;
  virtual Vector proba(const Matrix& x) const = 0;
};

// ---------------------------------------------------------------- LDA

/// Fisher LDA: w = Σ_w⁻¹(μ1−μ0), threshold at the projected class-mean
/// midpoint, logistic link on the discriminant.
class Lda : public BinaryHead {
 public:
  explicit Lda(bool shrinkage = false) : shrinkage_(shrinkage) {}

  void fit(const Matrix& x, const Labels& y, std::uint64_t) override {
    require_finite(x);
    const Eigen::Index n = x.rows(), d = x.cols();
    Eigen::RowVectorXd mu[2] = {Eigen::RowVectorXd::Zero(d), Eigen::RowVectorXd::Zero(d)};
    double count[2] = {0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[y[size_t(i)]] += x.row(i);
      ++count[y[size_t(i)]];
    }
    require(count[0] > 0 && count[1] > 0, ErrorCode::DegenerateLabels, "LDA needs both classes");
    mu[0] /= count[0];
    mu[1] /= count[1];
    Matrix z(n, d);
    for (Eigen::Index i = 0; i < n; ++i) z.row(i) = x.row(i) - mu[y[size_t(i)]];
    const RegularizedCovariance sw(std::move(z), std::max(1.0, double(n) - 2.0), shrinkage_);
    w_ = sw.solve((mu[1] - mu[0]).transpose());
    b_ = -0.5 * (mu[0] + mu[1]).dot(w_);
  }

  Vector decision(const Matrix& x) const override {
    require(x.cols() == w_.size(), ErrorCode::DimensionMismatch, "feature count differs from training");
    return (x * w_).array() + b_;
  }

  Vector proba(const Matrix& x) const override { return decision(x).unaryExpr(&sigmoid); }

  const Vector& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  bool shrinkage_;
  Vector w_;
  double b_ = 0;
};

// ------------------------------------------------- elastic-net logistic

struct ElasticNetOptions {
  double l1_ratio = 0.0;
  double strength = 0.0;  // multiplies l1_ratio·‖w‖₁ + (1−l1_ratio)/2·‖w‖²
  double tol = 1e-7;
  int max_iter = 5000;
};

struct LogisticFit {
  Vector w;  // in standardized feature space
  double b = 0;
  int iterations = 0;
};

/// Mean logistic loss + strength·(l1_ratio‖w‖₁ + (1−l1_ratio)/2‖w‖²), intercept
/// unpenalized, by FISTA with backtracking and adaptive restart. Stops when the
/// iterate moves less than tol or after max_iter steps.
inline LogisticFit fit_elastic_net(const Matrix& x, const Labels& y, const ElasticNetOptions& o) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Vector t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = y[size_t(i)] == 1 ? 1.0 : 0.0;
  const double l2 = o.strength * (1.0 - o.l1_ratio);
  const double l1 = o.strength * o.l1_ratio;

  auto smooth = [&](const Vector& w, double b) {
    const Vector z = (x * w).array() + b;
    double loss = 0;
    for (Eigen::Index i = 0; i < n; ++i) loss += softplus(z(i)) - t(i) * z(i);
    return loss / double(n) + 0.5 * l2 * w.squaredNorm();
  };
  auto gradient = [&](const Vector& w, double b, Vector& gw, double& gb) {
    const Vector z = (x * w).array() + b;
    Vector r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = sigmoid(z(i)) - t(i);
    gw = x.transpose() * r / double(n) + l2 * w;
    gb = r.mean();
  };
  auto objective = [&](const Vector& w, double b) { return smooth(w, b) + l1 * w.lpNorm<1>(); };

  Vector w = Vector::Zero(d), yw = w;
  double b = 0, yb = 0, momentum = 1.0;
  double lip = 1.0;
  double prev_obj = objective(w, b);
  LogisticFit out;
  Vector gw;
  double gb;
  for (int iter = 1; iter <= o.max_iter; ++iter) {
    out.iterations = iter;
    gradient(yw, yb, gw, gb);
    const double fy = smooth(yw, yb);
    Vector nw;
    double nb;
    for (int bt = 0; bt < 60; ++bt) {
      nw = yw - gw / lip;
      nw = nw.unaryExpr([&](double v) { return std::copysign(std::max(std::abs(v) - l1 / lip, 0.0), v); });
      nb = yb - gb / lip;
      const Vector dw = nw - yw;
      const double db = nb - yb;
      const double bound = fy + gw.dot(dw) + gb * db + 0.5 * lip * (dw.squaredNorm() + db * db);
      if (smooth(nw, nb) <= bound + 1e-12 * std::abs(bound)) break;
      lip *= 2.0;
    }
    const double step = std::sqrt((nw - w).squaredNorm() + (nb - b) * (nb - b));
    const double obj = objective(nw, nb);
    if (obj > prev_obj && momentum > 1.0) {
      // Restart: drop momentum and retry from the last accepted iterate.
      momentum = 1.0;
      yw = w;
      yb = b;
      continue;
    }
    const double next_m = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    yw = nw + ((momentum - 1.0) / next_m) * (nw - w);
    yb = nb + ((momentum - 1.0) / next_m) * (nb - b);
    momentum = next_m;
    w = std::move(nw);
    b = nb;
    prev_obj = obj;
    lip *= 0.9;  // let the step grow back slowly
    if (step < o.tol) break;
  }
  out.w = std::move(w);
  out.b = b;
  return out;
}

/// Logistic regression with internal standardization. `C` follows the usual
/// convention (loss summed, penalty weight 1/C), mapped to strength 1/(C·n).
class ElasticNetLogistic : public BinaryHead {
 public:
  ElasticNetLogistic(double l1_ratio, double c) : l1_ratio_(l1_ratio), c_(c) {
    require(l1_ratio >= 0 && l1_ratio <= 1, ErrorCode::InvalidHyper, "l1_ratio must be in [0,1]");
    require(c > 0, ErrorCode::InvalidHyper, "C must be positive");
  }

  void fit(const Matrix& x, const Labels& y, std::uint64_t) override {
    require_finite(x);
    scaler_.fit(x);
    ElasticNetOptions o;
    o.l1_ratio = l1_ratio_;
    o.strength = 1.0 / (c_ * double(x.rows()));
    fit_ = fit_elastic_net(scaler_.transform(x), y, o);
  }

  Vector decision(const Matrix& x) const override {
    return (scaler_.transform(x) * fit_.w).array() + fit_.b;
  }
  Vector proba(const Matrix& x) const override { return decision(x).unaryExpr(&sigmoid); }

  const LogisticFit& solution() const { return fit_; }

 private:
  double l1_ratio_, c_;
  Standardizer scaler_;
  LogisticFit fit_;
};

// ------------------------------------------------------ linear margin

/// Platt scaling: P(1|f) = σ(A·f + B) fitted by damped Newton on smoothed targets.
inline std::pair<double, double> platt_calibrate(const Vector& f, const Labels& y) {
  double pos = 0, neg = 0;
  for (int v : y) (v == 1 ? pos : neg) += 1;
  const double hi = (pos + 1) / (pos + 2), lo = 1 / (neg + 2);
  auto target = [&](Eigen::Index i) { return y[size_t(i)] == 1 ? hi : lo; };
  auto loss = [&](double a, double b) {
    double l = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double z = a * f(i) + b;
      l += softplus(z) - target(i) * z;
    }
    return l;
  };
  double a = 0, b = std::log((pos + 1) / (neg + 1));
  double current = loss(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0, gb = 0, haa = 1e-12, hab = 0, hbb = 1e-12;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double p = sigmoid(a * f(i) + b);
      const double r = p - target(i), w = p * (1 - p);
      ga += r * f(i);
      gb += r;
      haa += w * f(i) * f(i);
      hab += w * f(i);
      hbb += w;
    }
    const double det = haa * hbb - hab * hab;
    if (!(det > 0)) break;
    const double da = (hbb * ga - hab * gb) / det, db = (haa * gb - hab * ga) / det;
    double step = 1.0, next = current;
    for (; step > 1e-8; step *= 0.5) {
      next = loss(a - step * da, b - step * db);
      if (next <= current) break;
    }
    if (step <= 1e-8) break;
    a -= step * da;
    b -= step * db;
    const bool done = current - next < 1e-12 * std::max(1.0, current);
    current = next;
    if (done) break;
  }
  return {a, b};
}

struct MarginOptions {
  double c = 1.0;
  int epochs = 200;
};

/// L2-regularized hinge loss, λ/2‖w‖² + mean hinge with λ = 1/(C·n), by
/// Pegasos-style subgradient steps with projection and iterate averaging over
/// the second half of the epochs. Bias is an augmented constant feature.
class LinearMargin : public BinaryHead {
 public:
  explicit LinearMargin(MarginOptions o = {}) : opt_(o) {
    require(o.c > 0, ErrorCode::InvalidHyper, "C must be positive");
    require(o.epochs >= 1, ErrorCode::InvalidHyper, "epochs must be positive");
  }

  void fit(const Matrix& x_raw, const Labels& y, std::uint64_t seed) override {
    require_finite(x_raw);
    scaler_.fit(x_raw);
    const Matrix x = scaler_.transform(x_raw);
    const Eigen::Index n = x.rows(), d = x.cols();
    const double lambda = 1.0 / (opt_.c * double(n));
    const double radius = 1.0 / std::sqrt(lambda);
    Vector w = Vector::Zero(d + 1), avg = Vector::Zero(d + 1);
    double averaged = 0;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < opt_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index i : order) {
        ++t;
        const double eta = 1.0 / (lambda * double(t));
        const double s = y[size_t(i)] == 1 ? 1.0 : -1.0;
        const double margin = s * (x.row(i).dot(w.head(d)) + w(d));
        w *= (1.0 - eta * lambda);
        if (margin < 1.0) {
          w.head(d) += eta * s * x.row(i).transpose();
          w(d) += eta * s;
        }
        const double norm = w.norm();
        if (norm > radius) w *= radius / norm;
        if (epoch >= opt_.epochs / 2) {
          avg += w;
          averaged += 1;
        }
      }
    }
    w_ = avg / std::max(1.0, averaged);
    const Vector f = raw_decision(x);
    std::tie(platt_a_, platt_b_) = platt_calibrate(f, y);
  }

  Vector decision(const Matrix& x) const override { return raw_decision(scaler_.transform(x)); }

  Vector proba(const Matrix& x) const override {
    return decision(x).unaryExpr([&](double f) { return sigmoid(platt_a_ * f + platt_b_); });
  }

  /// Weight vector in standardized feature space (without the bias term).
  Vector weights() const { return w_.head(w_.size() - 1); }

 private:
  Vector raw_decision(const Matrix& x) const {
    const Eigen::Index d = x.cols();
    require(d + 1 == w_.size(), ErrorCode::DimensionMismatch, "feature count differs from training");
    return (x * w_.head(d)).array() + w_(d);
  }

  MarginOptions opt_;
  Standardizer scaler_;
  Vector w_;
  double platt_a_ = 1, platt_b_ = 0;
};

// ------------------------------------------------------------- OvR

using BinaryFactory = std::function<std::unique_ptr<BinaryHead>()>;

/// Multiclass wrapper: one binary head per class against the rest, P(class)
/// normalized across heads. With two classes a single head is trained.
class VecClassifier {
 public:
  explicit VecClassifier(BinaryFactory make) : make_(std::move(make)) {}

  void fit(const Matrix& x, const Labels& y, std::uint64_t seed) {
    require(static_cast<std::size_t>(x.rows()) == y.size(), ErrorCode::DimensionMismatch,
            "features and labels differ in length");
    classes_ = sorted_classes(y);
    require(classes_.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
    heads_.clear();
    const std::size_t n_heads = classes_.size() == 2 ? 1 : classes_.size();
    for (std::size_t k = 0; k < n_heads; ++k) {
      const int positive = classes_.size() == 2 ? classes_[1] : classes_[k];
      Labels y01(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) y01[i] = y[i] == positive ? 1 : 0;
      auto head = make_();
      head->fit(x, y01, derive_seed(seed, "ovr", k));
      heads_.push_back(std::move(head));
    }
  }

  Matrix predict_proba(const Matrix& x) const {
    require(!heads_.empty(), ErrorCode::InvalidInput, "classifier not fitted");
    Matrix p(x.rows(), static_cast<Eigen::Index>(classes_.size()));
    if (classes_.size() == 2) {
      const Vector p1 = heads_[0]->proba(x);
      p.col(0) = (1.0 - p1.array()).matrix();
      p.col(1) = p1;
      return p;
    }
    for (std::size_t k = 0; k < heads_.size(); ++k) p.col(Eigen::Index(k)) = heads_[k]->proba(x);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double s = p.row(i).sum();
      if (s > 0) p.row(i) /= s;
      else p.row(i).setConstant(1.0 / double(p.cols()));
    }
    return p;
  }

  const std::vector<int>& classes() const { return classes_; }
  const BinaryHead& head(std::size_t k) const { return *heads_.at(k); }

 private:
  BinaryFactory make_;
  std::vector<int> classes_;
  std::vector<std::unique_ptr<BinaryHead>> heads_;
};

}  // namespace eegbench::pipelines
