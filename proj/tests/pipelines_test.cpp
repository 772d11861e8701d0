#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eegbench/pipelines/catalog.hpp"
#include "eegbench/synth/synthgen.hpp"
#include "test_util.hpp"

namespace eegbench::pipelines {
namespace {

using testing::random_matrix;
using testing::random_spd;

spd::SpdMatrix diag(std::initializer_list<double> v) {
  Vector d(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return spd::SpdMatrix(Matrix(d.asDiagonal()));
}

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

double accuracy(const Labels& a, const Labels& b) {
  double hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return hit / double(a.size());
}

// Even/odd split of a synthetic session.
std::pair<dsp::Epochs, dsp::Epochs> split_half(const dsp::Epochs& e) {
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < e.size(); ++i) (i % 2 ? te : tr).push_back(i);
  return {e.subset(tr), e.subset(te)};
}

dsp::Epochs synth_epochs(Paradigm p, double snr, std::uint64_t seed, int trials = 40, int channels = 8) {
  synth::SynthSpec s;
  s.paradigm = p;
  s.snr = snr;
  s.seed = seed;
  s.n_trials_per_class = trials;
  s.n_channels = channels;
  if (p == Paradigm::ERP) {
    s.trial_len_s = 0.8;
    s.n_trials_per_class = trials / 2;
  }
  if (p == Paradigm::SSVEP) {
    s.sfreq = 256;
    s.n_classes = 3;
    s.trial_len_s = 2.0;
  }
  const auto d = synth::generate(s);
  return synth::session_epochs(d, d.sessions.front());
}

// ------------------------------------------------------------------ CSP

TEST(Csp, ToyDiagonalOracle) {
  // S_d = diag(3,−3), S_c = diag(5,5): λ = ±3/5, v = e_k/√5 normalized so vᵀS_c v = 1.
  const auto bank = csp_fit(diag({4, 1}), diag({1, 4}), 2);
  ASSERT_EQ(bank.size(), 2);
  EXPECT_NEAR(bank.eigenvalues(0), 0.6, 1e-10);
  EXPECT_NEAR(bank.eigenvalues(1), -0.6, 1e-10);
  EXPECT_NEAR(std::abs(bank.filters(0, 0)), 1 / std::sqrt(5.0), 1e-10);
  EXPECT_NEAR(bank.filters(0, 1), 0.0, 1e-10);
  EXPECT_NEAR(bank.filters(1, 0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(bank.filters(1, 1)), 1 / std::sqrt(5.0), 1e-10);
}

TEST(Csp, EqualClassesGiveZeroEigenvalues) {
  Rng rng(1);
  const auto s = random_spd(rng, 5);
  const auto bank = csp_fit(s, s, 4);
  EXPECT_LT(bank.eigenvalues.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Csp, FiltersHavePositiveCommonEnergy) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_spd(rng, 6), b = random_spd(rng, 6);
    const auto bank = csp_fit(a, b, 6);
    const Matrix sc = a.values() + b.values();
    for (Eigen::Index k = 0; k < bank.size(); ++k) {
      const Vector v = bank.filters.row(k).transpose();
      EXPECT_GT(v.dot(sc * v), 0.0);
      EXPECT_NEAR(v.dot(sc * v), 1.0, 1e-9);
    }
  }
}

TEST(Csp, LabelSwapNegatesEigenvaluesAndMirrorsOrder) {
  Rng rng(3);
  const auto a = random_spd(rng, 6), b = random_spd(rng, 6);
  const auto fwd = csp_fit(a, b, 6), rev = csp_fit(b, a, 6);
  // Order is max, min, 2nd max, 2nd min, … so swapping pairs up columns 2j ↔ 2j+1.
  for (Eigen::Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(rev.eigenvalues(2 * j), -fwd.eigenvalues(2 * j + 1), 1e-9);
    EXPECT_NEAR(rev.eigenvalues(2 * j + 1), -fwd.eigenvalues(2 * j), 1e-9);
    const double c = rev.filters.row(2 * j).normalized().dot(fwd.filters.row(2 * j + 1).normalized());
    EXPECT_NEAR(std::abs(c), 1.0, 1e-8);
  }
}

TEST(Csp, InvalidFilterCount) {
  EXPECT_EQ(code_of([] { csp_fit(diag({4, 1}), diag({1, 4}), 3); }), ErrorCode::InvalidHyper);
  EXPECT_EQ(code_of([] { csp_fit(diag({4, 1}), diag({1, 4}), 0); }), ErrorCode::InvalidHyper);
}

TEST(Trcsp, ZeroPenaltyEqualsCsp) {
  Rng rng(4);
  const auto a = random_spd(rng, 5), b = random_spd(rng, 5);
  const auto plain = csp_fit(a, b, 4), reg = trcsp_fit(a, b, 4, 0.0);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const Vector p = plain.filters.row(k), r = reg.filters.row(k);
    EXPECT_LT(std::min((p - r).norm(), (p + r).norm()), 1e-8);
  }
}

TEST(Trcsp, LargePenaltyAlignsWithDiscriminantMatrix) {
  Rng rng(5);
  const auto a = random_spd(rng, 5), b = random_spd(rng, 5);
  const Matrix sd = a.values() - b.values();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sd);  // oracle: ascending eigenvalues
  const Vector top = es.eigenvectors().col(4);
  const auto bank = trcsp_fit(a, b, 2, 1e6);
  EXPECT_GT(std::abs(bank.filters.row(0).normalized().dot(top)), 1 - 1e-3);
}

TEST(Trcsp, EigenvaluesShrinkWithPenalty) {
  // Toy case: λ(α) = ±3 / (5 + 5α), strictly decreasing in magnitude.
  double prev = 1e9;
  for (double alpha : {0.0, 0.1, 0.5, 1.0, 4.0, 100.0}) {
    const auto bank = trcsp_fit(diag({4, 1}), diag({1, 4}), 2, alpha);
    EXPECT_NEAR(bank.eigenvalues(0), 3.0 / (5.0 + 5.0 * alpha), 1e-10);
    EXPECT_LE(std::abs(bank.eigenvalues(0)), prev);
    prev = std::abs(bank.eigenvalues(0));
  }
}

// -------------------------------------------------------------- log-var

TEST(LogVar, UnitWhiteNoiseIsNearZero) {
  Rng rng(6);
  const Matrix x = random_matrix(rng, 3, 20000);
  const auto f = logvar_features(std::vector<Matrix>{x});
  EXPECT_LT(f.features.cwiseAbs().maxCoeff(), 0.05);
}

TEST(LogVar, ScalingAddsLogFourAndMatchesCovarianceDiagonal) {
  Rng rng(7);
  Matrix x = random_matrix(rng, 4, 300);
  const auto base = logvar_features(std::vector<Matrix>{x}).features;
  const Vector oracle = dsp::scm(x).diagonal().array().log();
  EXPECT_LT((base.row(0).transpose() - oracle).cwiseAbs().maxCoeff(), 1e-9);
  x.row(2) *= 2.0;
  const auto scaled = logvar_features(std::vector<Matrix>{x}).features;
  EXPECT_NEAR(scaled(0, 2) - base(0, 2), std::log(4.0), 1e-12);
  EXPECT_NEAR(scaled(0, 1), base(0, 1), 1e-15);
}

TEST(LogVar, ZeroVarianceIsFlooredAndCounted) {
  Matrix x = Matrix::Ones(2, 50);
  x.row(1).setLinSpaced(50, 0, 1);
  const auto f = logvar_features(std::vector<Matrix>{x});
  EXPECT_EQ(f.floored, 1u);
  EXPECT_DOUBLE_EQ(f.features(0, 0), std::log(1e-20));
}

// ---------------------------------------------------------------- FBCSP

TEST(Fbcsp, SingleBandEqualsCsp) {
  const dsp::Epochs e = synth_epochs(Paradigm::MI, 2.0, 11);
  FbcspFeatures fb({{10.0, 14.0}}, 4, std::nullopt);
  fb.fit(e);
  dsp::Epochs filtered = e;
  const auto f = dsp::design_butter_bandpass(10, 14, e.sfreq);
  for (auto& t : filtered.data) t = dsp::filtfilt_rows(f, t);
  CspFeatures csp(4, dsp::CovEstimator::Shrunk);
  csp.fit(filtered);
  EXPECT_LT((fb.transform(e) - csp.transform(filtered)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fbcsp, FullSelectionIsIdentityAndOversizeRejected) {
  const dsp::Epochs e = synth_epochs(Paradigm::MI, 2.0, 12);
  FbcspFeatures all({{8, 12}, {12, 16}}, 2, 4);
  all.fit(e);
  EXPECT_EQ(all.selected(), (std::vector<Eigen::Index>{0, 1, 2, 3}));
  FbcspFeatures over({{8, 12}, {12, 16}}, 2, 5);
  EXPECT_EQ(code_of([&] { over.fit(e); }), ErrorCode::InvalidHyper);
}

TEST(Fbcsp, TopFeatureComesFromSourceBand) {
  // Sources live in 10–14 Hz, so the most informative feature must come from a band overlapping it.
  const dsp::Epochs e = synth_epochs(Paradigm::MI, 2.0, 13);
  FbcspFeatures fb(default_filter_bank(), 2, std::nullopt);
  fb.fit(e);
  const std::size_t band = fb.band_of(fb.ranking().front());
  EXPECT_TRUE(band == 0 || band == 1) << "band " << band;
}

// ------------------------------------------------------------------ LDA

TEST(Lda, SymmetricOneDimensionalBoundaryAtZero) {
  Matrix x(6, 1);
  x << -1.2, -1.0, -0.8, 0.8, 1.0, 1.2;
  Lda lda;
  lda.fit(x, {0, 0, 0, 1, 1, 1}, 0);
  Matrix zero = Matrix::Zero(1, 1);
  EXPECT_NEAR(lda.decision(zero)(0), 0.0, 1e-12);
  EXPECT_GT(lda.weights()(0), 0.0);
}

TEST(Lda, DuplicatedColumnNeedsShrinkage) {
  Rng rng(8);
  Matrix x = random_matrix(rng, 40, 3);
  x.col(2) = x.col(1);
  Labels y(40);
  for (int i = 0; i < 40; ++i) y[size_t(i)] = i % 2;
  Lda plain(false), shrunk(true);
  EXPECT_EQ(code_of([&] { plain.fit(x, y, 0); }), ErrorCode::SingularCovariance);
  shrunk.fit(x, y, 0);
  EXPECT_TRUE(shrunk.weights().allFinite());
}

TEST(Lda, RecoversBayesDirection) {
  Rng rng(9);
  Matrix sigma(2, 2);
  sigma << 1.0, 0.8, 0.8, 1.0;
  const Eigen::LLT<Matrix> chol(sigma);
  Vector mu1(2);
  mu1 << 1.0, 0.2;
  const Vector bayes = sigma.inverse() * mu1;  // oracle Σ⁻¹(μ1 − μ0) with μ0 = 0
  const int n = 10000;
  Matrix x = chol.matrixL() * random_matrix(rng, 2, n);
  Labels y(n);
  for (int i = 0; i < n; ++i) {
    y[size_t(i)] = i % 2;
    if (i % 2) x.col(i) += mu1;
  }
  Lda lda;
  lda.fit(x.transpose(), y, 0);
  const double cosine = lda.weights().normalized().dot(bayes.normalized());
  EXPECT_GT(cosine, std::cos(5.0 * std::numbers::pi / 180));
}

// --------------------------------------------------------- elastic net

// Oracle: unregularized logistic regression by Newton–Raphson (IRLS) on [x, 1].
Vector newton_logistic(const Matrix& x, const Labels& y) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Matrix xa(n, d + 1);
  xa << x, Vector::Ones(n);
  Vector beta = Vector::Zero(d + 1);
  for (int it = 0; it < 100; ++it) {
    Vector p = (xa * beta).unaryExpr([](double z) { return 1 / (1 + std::exp(-z)); });
    Vector g = xa.transpose() * (p - Vector::NullaryExpr(n, [&](Eigen::Index i) { return double(y[size_t(i)]); }));
    Matrix h = xa.transpose() * (p.array() * (1 - p.array())).matrix().asDiagonal() * xa;
    const Vector step = h.ldlt().solve(g);
    beta -= step;
    if (step.norm() < 1e-14) break;
  }
  return beta;
}

TEST(ElasticNet, ZeroStrengthMatchesNewton) {
  Rng rng(10);
  const int n = 300;
  Matrix x = random_matrix(rng, n, 3);
  Labels y(n);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < n; ++i) {
    const double z = 0.8 * x(i, 0) - 0.5 * x(i, 1) + 0.2;
    y[size_t(i)] = u(rng) < 1 / (1 + std::exp(-z)) ? 1 : 0;
  }
  ElasticNetOptions o;
  o.l1_ratio = 0.5;
  o.strength = 0.0;
  const LogisticFit fit = fit_elastic_net(x, y, o);
  const Vector oracle = newton_logistic(x, y);
  EXPECT_LT((fit.w - oracle.head(3)).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(fit.b, oracle(3), 1e-4);
}

TEST(ElasticNet, FullL1ShrinkageZeroesWeights) {
  Rng rng(11);
  Matrix x = random_matrix(rng, 100, 4);
  Labels y(100);
  for (int i = 0; i < 100; ++i) y[size_t(i)] = x(i, 0) > 0;
  ElasticNetOptions o;
  o.l1_ratio = 1.0;
  o.strength = 1e3;
  EXPECT_EQ(fit_elastic_net(x, y, o).w.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ElasticNet, SeparableOrientation) {
  Matrix x(8, 1);
  x << -4, -3, -2, -1, 1, 2, 3, 4;
  ElasticNetLogistic up(0.5, 1.0), down(0.5, 1.0);
  up.fit(x, {0, 0, 0, 0, 1, 1, 1, 1}, 0);
  down.fit(x, {1, 1, 1, 1, 0, 0, 0, 0}, 0);
  EXPECT_GT(up.solution().w(0), 0);
  EXPECT_LT(down.solution().w(0), 0);
}

TEST(ElasticNet, NonFiniteFeaturesRejected) {
  Matrix x = Matrix::Ones(4, 1);
  x(2, 0) = std::nan("");
  ElasticNetLogistic lr(0.5, 1.0);
  EXPECT_EQ(code_of([&] { lr.fit(x, {0, 0, 1, 1}, 0); }), ErrorCode::InvalidInput);
}

// --------------------------------------------------------------- margin

std::pair<Matrix, Labels> separable(Rng& rng, int n, int d) {
  Matrix x = random_matrix(rng, n, d);
  Labels y(std::size_t(n), 0);
  for (int i = 0; i < n; ++i) {
    const double m = x(i, 0) + 0.5 * x(i, 1);
    y[size_t(i)] = m > 0;
    x(i, 0) += m > 0 ? 0.5 : -0.5;  // margin gap
  }
  return {x, y};
}

TEST(LinearMargin, SeparableTrainingAccuracy) {
  Rng rng(12);
  const auto [x, y] = separable(rng, 200, 3);
  LinearMargin svm;
  svm.fit(x, y, 1);
  Labels pred(y.size());
  const Vector d = svm.decision(x);
  for (std::size_t i = 0; i < y.size(); ++i) pred[i] = d(Eigen::Index(i)) > 0;
  EXPECT_DOUBLE_EQ(accuracy(pred, y), 1.0);
}

TEST(LinearMargin, VanishingCShrinksWeights) {
  Rng rng(13);
  const auto [x, y] = separable(rng, 100, 3);
  MarginOptions o;
  o.c = 1e-8;
  LinearMargin svm(o);
  svm.fit(x, y, 1);
  EXPECT_LT(svm.weights().norm(), 1e-3);
}

TEST(LinearMargin, AgreesWithLogistic) {
  Rng rng(14);
  const auto [x, y] = separable(rng, 300, 4);
  LinearMargin svm;
  ElasticNetLogistic lr(0.5, 1.0);
  svm.fit(x, y, 3);
  lr.fit(x, y, 3);
  const Vector a = svm.decision(x), b = lr.decision(x);
  double agree = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) agree += (a(i) > 0) == (b(i) > 0);
  EXPECT_GE(agree / double(a.size()), 0.95);
}

// ------------------------------------------------------------ MDM/FgMDM

// Covariances sampled around class centers: C_k^{1/2} W C_k^{1/2} with W a
// sample covariance of T white samples.
CovSet sample_around(Rng& rng, const spd::SpdMatrix& center, int count, int samples) {
  const Matrix root = spd::sqrtm(center).values();
  CovSet out;
  for (int i = 0; i < count; ++i) {
    const Matrix z = random_matrix(rng, center.dim(), samples);
    out.push_back(spd::SpdMatrix(spd::symmetrize(root * (z * z.transpose() / samples) * root)));
  }
  return out;
}

struct CovProblem {
  CovSet train, test;
  Labels ytrain, ytest;
};

CovProblem two_clusters(Rng& rng, const spd::SpdMatrix& a, const spd::SpdMatrix& b, int per_class, int samples) {
  CovProblem p;
  for (int k = 0; k < 2; ++k) {
    const auto& c = k == 0 ? a : b;
    for (auto& m : sample_around(rng, c, per_class, samples)) {
      p.train.push_back(m);
      p.ytrain.push_back(k);
    }
    for (auto& m : sample_around(rng, c, per_class, samples)) {
      p.test.push_back(m);
      p.ytest.push_back(k);
    }
  }
  return p;
}

Labels argmax(const Matrix& p, const std::vector<int>& classes) {
  Labels out;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index k;
    p.row(i).maxCoeff(&k);
    out.push_back(classes[size_t(k)]);
  }
  return out;
}

TEST(Mdm, ClassMeanIsClassifiedAsItsClass) {
  Rng rng(15);
  const auto p = two_clusters(rng, random_spd(rng, 4), random_spd(rng, 4), 10, 50);
  Mdm mdm;
  mdm.fit(p.train, p.ytrain);
  const Matrix prob = mdm.predict_proba(mdm.means());
  EXPECT_EQ(argmax(prob, mdm.classes()), (Labels{0, 1}));
}

TEST(Mdm, SingletonClassesKeepTheirTrial) {
  Rng rng(16);
  const CovSet covs = {random_spd(rng, 3), random_spd(rng, 3)};
  Mdm mdm;
  mdm.fit(covs, {0, 1});
  for (int k = 0; k < 2; ++k) EXPECT_LT((mdm.means()[size_t(k)].values() - covs[size_t(k)].values()).norm(), 1e-10);
}

TEST(Mdm, SeparatesDistinctCenters) {
  Rng rng(17);
  const auto a = diag({1, 1, 1, 1}), b = diag({2.5, 1, 0.4, 1});
  const auto p = two_clusters(rng, a, b, 40, 60);
  Mdm mdm;
  mdm.fit(p.train, p.ytrain);
  EXPECT_GT(accuracy(argmax(mdm.predict_proba(p.test), mdm.classes()), p.ytest), 0.9);
}

TEST(Mdm, CongruenceLeavesPredictionsUnchanged) {
  Rng rng(18);
  const auto p = two_clusters(rng, random_spd(rng, 4), random_spd(rng, 4), 15, 20);
  const Matrix w = testing::random_invertible(rng, 4);
  auto moved = [&](const CovSet& s) {
    CovSet out;
    for (const auto& m : s) out.push_back(spd::congruence(m, w));
    return out;
  };
  Mdm a, b;
  a.fit(p.train, p.ytrain);
  b.fit(moved(p.train), p.ytrain);
  EXPECT_EQ(argmax(a.predict_proba(p.test), a.classes()), argmax(b.predict_proba(moved(p.test)), b.classes()));
}

TEST(FgMdm, BinarySubspaceIsOneDimensionalAndIdempotent) {
  Rng rng(19);
  const auto p = two_clusters(rng, random_spd(rng, 5), random_spd(rng, 5), 20, 40);
  GeodesicFilter f;
  f.fit(p.train, p.ytrain);
  EXPECT_EQ(f.rank(), 1);
  const Matrix t = f.tangent_space().transform(p.test);
  const Matrix once = f.project(t);
  EXPECT_LT((f.project(once) - once).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FgMdm, MulticlassSubspaceRank) {
  Rng rng(20);
  CovSet covs;
  Labels y;
  for (int k = 0; k < 4; ++k) {
    const auto center = random_spd(rng, 4);
    for (auto& m : sample_around(rng, center, 10, 40)) {
      covs.push_back(m);
      y.push_back(k);
    }
  }
  GeodesicFilter f;
  f.fit(covs, y);
  EXPECT_EQ(f.rank(), 3);
}

TEST(FgMdm, NoWorseThanMdmOnNoisyHighDimensionalData) {
  // Classes differ along two channels out of 16; the other 14 only add noise.
  Rng rng(21);
  Vector da = Vector::Ones(16), db = Vector::Ones(16);
  db(0) = 1.8;
  db(1) = 0.55;
  const spd::SpdMatrix a(Matrix(da.asDiagonal())), b(Matrix(db.asDiagonal()));
  double fg_total = 0, mdm_total = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto p = two_clusters(rng, a, b, 40, 40);
    Mdm mdm;
    FgMdm fg;
    mdm.fit(p.train, p.ytrain);
    fg.fit(p.train, p.ytrain);
    mdm_total += accuracy(argmax(mdm.predict_proba(p.test), mdm.classes()), p.ytest);
    fg_total += accuracy(argmax(fg.predict_proba(p.test), fg.classes()), p.ytest);
  }
  EXPECT_GE(fg_total / 3, mdm_total / 3 - 0.02);
}

// -------------------------------------------------------- tangent space

TEST(TangentSpace, DimensionAndReferenceMapsToZero) {
  Rng rng(22);
  CovSet covs;
  for (int i = 0; i < 12; ++i) covs.push_back(random_spd(rng, 8));
  TangentSpace ts;
  ts.fit(covs);
  EXPECT_EQ(ts.transform(covs).cols(), 36);
  EXPECT_LT(ts.transform({ts.reference()}).cwiseAbs().maxCoeff(), 1e-10);
}

// ---------------------------------------------------------------- XDAWN

dsp::Epochs evoked_on_channel_one(Rng& rng, int n_target, int n_other) {
  dsp::Epochs e;
  e.sfreq = 100;
  Eigen::RowVectorXd wave(80);
  for (Eigen::Index t = 0; t < 80; ++t) wave(t) = 3.0 * std::exp(-std::pow((t - 30) / 5.0, 2));
  for (int i = 0; i < n_target + n_other; ++i) {
    Matrix x = random_matrix(rng, 6, 80);
    const bool target = i < n_target;
    if (target) x.row(0) += wave;
    e.data.push_back(x);
    e.labels.push_back(target ? 1 : 0);
  }
  e.class_names = {"NonTarget", "Target"};
  return e;
}

TEST(Xdawn, LeadingFilterConcentratesOnEvokedChannel) {
  Rng rng(23);
  const auto e = evoked_on_channel_one(rng, 40, 120);
  const auto bank = xdawn_fit(e, 1, 2);
  const Vector w = bank.filters.row(0).transpose();
  EXPECT_GT(std::abs(w(0)) / w.norm(), 0.9);
}

TEST(Xdawn, FilterCountBoundAndSignalOrthogonality) {
  Rng rng(24);
  const auto e = evoked_on_channel_one(rng, 20, 60);
  EXPECT_EQ(code_of([&] { xdawn_fit(e, 1, 7); }), ErrorCode::InvalidHyper);
  const Matrix sig = signal_covariance(e);
  const auto bank = xdawn_fit(e, 1, 4, sig);
  const Matrix gram = bank.filters * sig * bank.filters.transpose();
  EXPECT_LT((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Xdawn, NoTargetTrialsIsDegenerate) {
  Rng rng(25);
  auto e = evoked_on_channel_one(rng, 0, 20);
  EXPECT_EQ(code_of([&] { xdawn_fit(e, 1, 2); }), ErrorCode::DegenerateLabels);
}

// ------------------------------------------------------------ ERP cov

TEST(ErpCov, Dimensions) {
  Rng rng(26);
  const Matrix x = random_matrix(rng, 5, 60), p = random_matrix(rng, 5, 60);
  EXPECT_EQ(erp_cov(x, p).dim(), 10);
  const Matrix x31 = random_matrix(rng, 31, 100), p31 = random_matrix(rng, 31, 100);
  EXPECT_EQ(erp_cov(x31, compress_prototype(p31, 4)).dim(), 35);
  EXPECT_EQ(code_of([&] { compress_prototype(p, 6); }), ErrorCode::InvalidHyper);
}

TEST(ErpCov, ZeroPrototypeLeavesShrunkTrialBlock) {
  // With P = 0 the stacked SCM is blockdiag(0, S), so shrinkage must give
  // upper-left c·I, zero cross block, and lower-right a·S + c·I.
  Rng rng(27);
  const Matrix x = random_matrix(rng, 4, 200);
  const Matrix out = erp_cov(x, Matrix::Zero(4, 200)).values();
  const Matrix s = dsp::scm(x);
  const double c = out(0, 0);
  EXPECT_LT((out.topLeftCorner(4, 4) - c * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(out.topRightCorner(4, 4).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix lr = out.bottomRightCorner(4, 4) - c * Matrix::Identity(4, 4);
  const double a = (lr.array() * s.array()).sum() / s.squaredNorm();
  EXPECT_GT(a, 0.0);
  EXPECT_LE(a, 1.0 + 1e-12);
  EXPECT_LT((lr - a * s).cwiseAbs().maxCoeff(), 1e-9);
}

// -------------------------------------------------------------- SSVEP

Matrix sinusoid(double f, double sfreq, Eigen::Index n, Eigen::Index channels, double phase = 0.3) {
  Matrix x(channels, n);
  for (Eigen::Index c = 0; c < channels; ++c)
    for (Eigen::Index t = 0; t < n; ++t)
      x(c, t) = (1.0 + 0.2 * double(c)) * std::sin(2 * std::numbers::pi * f * double(t) / sfreq + phase + 0.1 * c);
  return x;
}

TEST(Cca, PureSinusoidPicksItsFrequency) {
  const Matrix trial = sinusoid(12, 256, 512, 4);
  CcaDetector cca({10, 12, 15}, {0, 1, 2}, 256, 3);
  const Vector rho = cca.correlations(trial);
  Eigen::Index k;
  rho.maxCoeff(&k);
  EXPECT_EQ(k, 1);
  EXPECT_GT(rho(1), 0.99);
  EXPECT_GE(rho.minCoeff(), 0.0);
  EXPECT_LE(rho.maxCoeff(), 1.0);
}

TEST(Cca, WhiteNoiseCorrelationStaysLow) {
  Rng rng(28);
  const Matrix trial = random_matrix(rng, 8, 1024);
  CcaDetector cca({10, 12, 15}, {0, 1, 2}, 256, 2);
  EXPECT_LT(cca.correlations(trial).maxCoeff(), 0.5);
}

TEST(Cca, NyquistViolationRejected) {
  EXPECT_EQ(code_of([] { CcaDetector({50}, {0}, 128, 2); }), ErrorCode::InvalidBand);
}

TEST(Trca, IdenticalTrialsMaximizeEigenvalue) {
  // For N identical trials S = N(N−1)XXᵀ and Q = N·XXᵀ, so λ = N−1 is the upper bound.
  Rng rng(29);
  const Matrix base = random_matrix(rng, 4, 200);
  std::vector<Matrix> same(5, base), noisy;
  for (int i = 0; i < 5; ++i) noisy.push_back(base + 0.5 * random_matrix(rng, 4, 200));
  const double top = trca_filter(same).eigenvalue;
  EXPECT_NEAR(top, 4.0, 1e-6);
  EXPECT_LT(trca_filter(noisy).eigenvalue, top);
}

TEST(Trca, SingleTrialClassIsDegenerate) {
  Rng rng(30);
  EXPECT_EQ(code_of([&] { trca_filter({random_matrix(rng, 3, 50)}); }), ErrorCode::DegenerateLabels);
}

TEST(Trca, CorrelationsBoundedAndAccurateOnSynthetic) {
  const auto [train, test] = split_half(synth_epochs(Paradigm::SSVEP, 5.0, 31));
  Trca trca;
  trca.fit(train);
  for (const auto& t : test.data) {
    const Vector r = trca.correlations(t);
    EXPECT_GE(r.minCoeff(), -1.0);
    EXPECT_LE(r.maxCoeff(), 1.0);
  }
  EXPECT_GT(accuracy(argmax(trca.predict_proba(test.data), trca.classes()), test.labels), 0.9);
}

TEST(SsvepCov, DimensionAndDominantBlock) {
  Rng rng(32);
  const Matrix noise = random_matrix(rng, 8, 512);
  EXPECT_EQ(ssvep_extended_cov(noise, 256, {10, 13, 17}).dim(), 24);
  const Matrix pure = sinusoid(10, 256, 1024, 8);
  const Matrix c = ssvep_extended_cov(pure, 256, {10, 13, 17}).values();
  EXPECT_GT(c.topLeftCorner(8, 8).trace() / c.trace(), 0.6);
}

// -------------------------------------------------------- catalog level

const std::vector<std::string> kInScope = {
    "LogVar + LDA", "LogVar + SVM", "CSP + LDA", "CSP + SVM", "TRCSP + LDA", "DLCSPauto + shLDA",
    "FBCSP+SVM", "FgMDM", "MDM", "TS + EL", "TS + LR", "TS + SVM", "ACM + TS + SVM",
    "XDAWN + LDA", "XDAWNCov + MDM", "ERPCov(svd_n=4) + MDM", "XDAWNCov + TS + SVM", "ERPCov + MDM",
    "TRCA", "CCA", "SSVEP MDM", "SSVEP TS + LR", "SSVEP TS + SVM"};

TEST(Catalog, EveryTableNameConstructs) {
  for (const auto& name : kInScope) EXPECT_NO_THROW(make_model(name, {}, 8)) << name;
  EXPECT_EQ(code_of([] { find_pipeline("EEGNet 8 2"); }), ErrorCode::NotFound);
}

TEST(Catalog, HyperparameterValidation) {
  EXPECT_EQ(code_of([] { make_model("MDM", {{"svc_C", 1}}, 8); }), ErrorCode::InvalidHyper);
  EXPECT_EQ(code_of([] { make_model("TS+SVM", {{"svc_kernel", 0}}, 8); }), ErrorCode::InvalidHyper);
  EXPECT_EQ(code_of([] { make_model("CSP+LDA", {{"csp_nfilter", 2.5}}, 8); }), ErrorCode::InvalidHyper);
  EXPECT_EQ(code_of([] { make_model("TS+EL", {{"logisticregression_l1_ratio", 1.5}}, 8); }),
            ErrorCode::InvalidHyper);
}

TEST(Catalog, DefaultGrids) {
  const Grid csp = default_grid("CSP+SVM", 22);
  ASSERT_EQ(csp.size(), 2u);
  EXPECT_EQ(csp[0].second.size(), 7u);
  EXPECT_EQ(expand_grid(csp).size(), 21u);
  EXPECT_EQ(default_grid("TS+EL", 22)[0].second, (std::vector<double>{0.20, 0.30, 0.45, 0.65, 0.75}));
  EXPECT_EQ(default_grid("ACM+TS+SVM", 22)[0].second.size(), 10u);
  EXPECT_EQ(default_grid("ACM+TS+SVM", 62)[0].second.size(), 5u);
  EXPECT_EQ(default_grid("ACM+TS+SVM", 128)[1].second.size(), 3u);
  EXPECT_TRUE(default_grid("MDM", 8).empty());
  // First key varies slowest.
  const auto expanded = expand_grid(csp);
  EXPECT_EQ(expanded[0].at("csp_nfilter"), 2);
  EXPECT_EQ(expanded[1].at("csp_nfilter"), 2);
  EXPECT_EQ(expanded[1].at("svc_C"), 1.0);
}

TEST(Catalog, SingleClassIsDegenerate) {
  auto e = synth_epochs(Paradigm::MI, 1.0, 33);
  for (auto& l : e.labels) l = 0;
  EXPECT_EQ(code_of([&] { fit("MDM", e, {}, 0); }), ErrorCode::DegenerateLabels);
}

TEST(Catalog, ContractShapes) {
  const auto e = synth_epochs(Paradigm::MI, 2.0, 34);
  auto mdm = fit("MDM", e, {}, 0);
  EXPECT_EQ(dynamic_cast<CovModel&>(*mdm).mdm().means().size(), 2u);
  auto csp = fit("CSP+LDA", e, {{"csp_nfilter", 4}}, 0);
  const auto& vm = dynamic_cast<VecModel&>(*csp);
  EXPECT_EQ(dynamic_cast<const CspFeatures&>(vm.features()).banks().front().size(), 4);
  EXPECT_EQ(dynamic_cast<const Lda&>(vm.head().head(0)).weights().size(), 4);
}

TEST(Catalog, ShapeMismatchAtPredict) {
  const auto e = synth_epochs(Paradigm::MI, 2.0, 35);
  auto m = fit("TS+LR", e, {}, 0);
  dsp::Epochs other = e;
  for (auto& t : other.data) t = t.topRows(7).eval();
  EXPECT_EQ(code_of([&] { m->predict_proba(other); }), ErrorCode::DimensionMismatch);
}

class EveryPipeline : public ::testing::TestWithParam<std::string> {};

TEST_P(EveryPipeline, SimplexAndDeterminism) {
  const auto& entry = find_pipeline(GetParam());
  const auto [train, test] = split_half(synth_epochs(entry.paradigm, 2.0, 36));
  Hyper h;
  if (entry.name == "ACM+TS+SVM") h = {{"augmenteddataset_order", 2}, {"augmenteddataset_lag", 1}};
  const auto a = fit(entry.name, train, h, 7), b = fit(entry.name, train, h, 7);
  const Matrix pa = a->predict_proba(test), pb = b->predict_proba(test);
  ASSERT_EQ(pa.rows(), Eigen::Index(test.size()));
  ASSERT_EQ(pa.cols(), Eigen::Index(a->classes().size()));
  EXPECT_TRUE(pa.allFinite());
  EXPECT_GE(pa.minCoeff(), 0.0);
  EXPECT_LE(pa.maxCoeff(), 1.0);
  EXPECT_LT((pa.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
  EXPECT_TRUE(pa == pb) << "refit is not bit-reproducible";
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> n;
  for (const auto& e : catalog()) n.push_back(e.name);
  return n;
}

INSTANTIATE_TEST_SUITE_P(Catalog, EveryPipeline, ::testing::ValuesIn(catalog_names()),
                         [](const auto& info) {
                           std::string s;
                           for (char c : info.param) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
                           return s;
                         });

TEST(EndToEnd, TangentLogisticSeparatesHighSnrMi) {
  const auto [train, test] = split_half(synth_epochs(Paradigm::MI, 5.0, 37));
  auto m = fit("TS+LR", train, {}, 0);
  EXPECT_GT(accuracy(m->predict(test), test.labels), 0.95);
}

TEST(EndToEnd, CcaDetectsSyntheticFrequencies) {
  const auto [train, test] = split_half(synth_epochs(Paradigm::SSVEP, 5.0, 38));
  auto m = fit("CCA", train, {}, 0);
  EXPECT_GT(accuracy(m->predict(test), test.labels), 0.95);
}

}  // namespace
}  // namespace eegbench::pipelines
