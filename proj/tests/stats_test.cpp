#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eegbench/stats/stouffer.hpp"

namespace eegbench::stats {
namespace {

// Oracle: Φ from the Maclaurin series of erf in long double (converges for
// |x| < ~6 with enough terms), inverted by bisection.
long double erf_series(long double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return 2 / std::sqrt(std::numbers::pi_v<long double>) * sum;
}
long double phi_oracle(long double x) { return 0.5L * (1 + erf_series(x / std::sqrt(2.0L))); }
double phi_inv_oracle(double q) {
  long double lo = -7, hi = 7;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (phi_oracle(mid) < q ? lo : hi) = mid;
  }
  return double(0.5L * (lo + hi));
}

// Oracle: materialize every sign pattern and compute t with two-pass mean/std.
double exhaustive_oracle(const std::vector<double>& d) {
  const std::size_t n = d.size();
  auto t_of = [&](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= double(n);
    double var = 0;
    for (double x : v) var += (x - m) * (x - m);
    const double sd = std::sqrt(var / double(n - 1));
    if (sd < 1e-12) return m > 0 ? INFINITY : (m < 0 ? -INFINITY : 0.0);
    return m / (sd / std::sqrt(double(n)));
  };
  const double obs = t_of(d);
  int count = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i & 1) ? -d[i] : d[i];
    const double t = t_of(v);
    if (std::isinf(obs) ? t >= obs : t >= obs - 1e-9) ++count;
  }
  return double(count) / double(1u << n);
}

TEST(PhiInv, ValuesAndSymmetry) {
  EXPECT_EQ(phi_inv(0.5), 0.0);
  EXPECT_NEAR(phi_inv(0.975), 1.959964, 1e-5);
  // Dyadic q keeps 1 − q exact, so the check measures phi_inv and not input rounding.
  for (double q : {std::ldexp(1.0, -33), std::ldexp(1.0, -20), std::ldexp(1.0, -10), 0.0078125,
                   0.0234375, 0.125, 0.3125, 0.5, 0.6875, 0.9375, 0.9921875}) {
    EXPECT_NEAR(phi_inv(q), -phi_inv(1 - q), 1e-9) << q;
    if (q > 1e-7) {
      EXPECT_NEAR(phi_inv(q), phi_inv_oracle(q), 1e-9) << q;
    }
  }
}

TEST(PermTest, EqualScoresGivePOne) {
  const std::vector<double> a{0.7, 0.8, 0.65, 0.9};
  EXPECT_EQ(perm_paired_ttest(a, a), 1.0);
}

TEST(PermTest, ConstantPositiveDifferenceIsMinimal) {
  const std::vector<double> a{2, 3, 4}, b{1, 2, 3};
  EXPECT_DOUBLE_EQ(perm_paired_ttest(a, b), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(exhaustive_oracle({1, 1, 1}), 1.0 / 8.0);
}

TEST(PermTest, ExhaustiveMatchesOracleAndIsDyadic) {
  Rng rng(4);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 11;
    std::vector<double> a(n), b(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = n01(rng) + 0.3;
      b[i] = n01(rng);
      d[i] = a[i] - b[i];
    }
    const double p = perm_paired_ttest(a, b);
    EXPECT_NEAR(p, exhaustive_oracle(d), 1e-12);
    const double k = p * double(1u << n);
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(PermTest, MonteCarloAgreesWithExhaustive) {
  Rng rng(5);
  std::normal_distribution<double> n01;
  std::vector<double> a(10), b(10);
  for (int i = 0; i < 10; ++i) {
    a[i] = n01(rng) + 0.4;
    b[i] = n01(rng);
  }
  PermutationOptions exact;
  exact.force = Method::PermExact;
  const double pe = perm_paired_ttest(a, b, exact);
  double mean_mc = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PermutationOptions mc;
    mc.force = Method::PermMc;
    mc.seed = seed;
    const double pm = perm_paired_ttest(a, b, mc);
    const double se = std::sqrt(pe * (1 - pe) / mc.n_mc);
    EXPECT_LE(std::abs(pm - pe), 3 * se + 1.0 / mc.n_mc) << seed;
    mean_mc += pm / 10;
  }
  EXPECT_NEAR(mean_mc, pe, 0.02);
}

TEST(PermTest, MonteCarloIsSeedDeterministic) {
  std::vector<double> a(15), b(15, 0.0);
  for (int i = 0; i < 15; ++i) a[i] = std::sin(i) + 0.2;
  PermutationOptions o;
  o.seed = 99;
  EXPECT_EQ(perm_paired_ttest(a, b, o), perm_paired_ttest(a, b, o));
}

// Oracle: W+ by explicit O(n²) midranks.
double wilcoxon_oracle(const std::vector<double>& d_all) {
  std::vector<double> d;
  for (double v : d_all)
    if (v != 0) d.push_back(v);
  const double n = double(d.size());
  double w = 0, ties = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : d) {
      if (std::abs(v) < std::abs(d[i])) ++less;
      if (std::abs(v) == std::abs(d[i])) ++equal;
    }
    if (d[i] > 0) w += less + (equal + 1) / 2;
    ties += (equal * equal - 1) / 48.0;  // Σ over tie groups of (t³−t)/48, spread per member
  }
  const double var = n * (n + 1) * (2 * n + 1) / 24 - ties;
  const double z = (w - n * (n + 1) / 4 - 0.5) / std::sqrt(var);
  return double(1 - phi_oracle(z));
}

TEST(Wilcoxon, AllPositiveSequence) {
  std::vector<double> a(25), b(25, 0.0);
  for (int i = 0; i < 25; ++i) a[i] = i + 1;
  const double p = wilcoxon_signed_rank(a, b);
  EXPECT_LT(p, 1e-4);
  EXPECT_NEAR(p, wilcoxon_oracle(a), 1e-9);
}

TEST(Wilcoxon, MirroredHalvesNearHalf) {
  std::vector<double> a, b;
  for (int i = 1; i <= 15; ++i) {
    a.push_back(i * 0.1);
    a.push_back(-i * 0.1);
  }
  b.assign(a.size(), 0.0);
  EXPECT_NEAR(wilcoxon_signed_rank(a, b), 0.5, 0.05);
}

TEST(Wilcoxon, TiesAndZerosMatchOracle) {
  const std::vector<double> d{0, 1, 1, -1, 2, 2, 2, -3, 0, 4, 5, 5, -0.5, 6, 1, 2, 3, 3, 7, 8, -2, 9};
  const std::vector<double> zero(d.size(), 0.0);
  EXPECT_NEAR(wilcoxon_signed_rank(d, zero), wilcoxon_oracle(d), 1e-12);
}

TEST(Wilcoxon, SignSymmetryComplement) {
  Rng rng(6);
  std::normal_distribution<double> n01;
  std::vector<double> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = n01(rng) + 0.2;
    b[i] = n01(rng);
  }
  const double pab = wilcoxon_signed_rank(a, b), pba = wilcoxon_signed_rank(b, a);
  // Continuity correction makes the two tails overlap by one half-step.
  EXPECT_NEAR(pab + pba, 1.0, 0.02);
  EXPECT_GE(pab + pba, 1.0);
  EXPECT_EQ(wilcoxon_signed_rank(a, a), 1.0);
}

TEST(Smd, ConstructedShiftAndAntisymmetry) {
  Rng rng(7);
  std::normal_distribution<double> jitter(0.0, 0.5);
  const std::size_t n = 4000;
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = std::sin(double(i));
    a[i] = b[i] + 1.0 + jitter(rng);
  }
  const double j = 1 - 3.0 / (4.0 * (double(n) - 1) - 1);
  EXPECT_NEAR(smd(a, b), 1.0 / 0.5 * j, 0.1);
  EXPECT_DOUBLE_EQ(smd(a, b), -smd(b, a));

  const std::vector<double> small_a{1, 2, 4}, small_b{0, 0, 0};
  // mean 7/3, sd √(7/3); J(2) = 1 − 3/7.
  EXPECT_NEAR(smd(small_a, small_b), (7.0 / 3.0) / std::sqrt(7.0 / 3.0) * (4.0 / 7.0), 1e-12);
  try {
    smd(small_a, small_a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EffectUndefined);
  }
}

TEST(Compare, DispatchThresholds) {
  EXPECT_EQ(method_for(9), Method::PermExact);
  EXPECT_EQ(method_for(15), Method::PermMc);
  EXPECT_EQ(method_for(54), Method::Wilcoxon);
  for (std::size_t n = 2; n <= 200; ++n) {
    const Method expected = n < 13 ? Method::PermExact : (n <= 20 ? Method::PermMc : Method::Wilcoxon);
    EXPECT_EQ(method_for(n), expected) << n;
  }
  EXPECT_EQ(method_for(12), Method::PermExact);
  EXPECT_EQ(method_for(13), Method::PermMc);
  EXPECT_EQ(method_for(20), Method::PermMc);
  EXPECT_EQ(method_for(21), Method::Wilcoxon);
}

TEST(Compare, PValuesInRangeAndSmdAttached) {
  Rng rng(8);
  std::normal_distribution<double> n01;
  for (std::size_t n : {2u, 5u, 12u, 13u, 20u, 21u, 54u}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = n01(rng);
      b[i] = n01(rng);
    }
    const auto s = compare_pipelines("ds", a, b);
    EXPECT_GT(s.p_value, 0.0);
    EXPECT_LE(s.p_value, 1.0);
    EXPECT_TRUE(s.smd.has_value());
    EXPECT_EQ(s.method, method_for(n));
  }
  const std::vector<double> same{0.5, 0.6, 0.7};
  const auto eq = compare_pipelines("ds", same, same);
  EXPECT_EQ(eq.p_value, 1.0);
  EXPECT_EQ(eq.smd.value(), 0.0);
}

DatasetStat stat(std::size_t n, double p, std::optional<double> s = 0.0) {
  return DatasetStat{"d", n, p, s, Method::PermExact};
}

TEST(Stouffer, SingleDatasetIsIdentity) {
  for (double p : {0.001, 0.03, 0.5, 0.97}) {
    const auto c = stouffer_combine({stat(9, p, 0.4)});
    EXPECT_NEAR(c.p_value, p, 1e-12);
    EXPECT_NEAR(c.combined_smd.value(), 0.4, 1e-15);
  }
}

TEST(Stouffer, TwoEqualDatasets) {
  const auto c = stouffer_combine({stat(10, 0.05), stat(10, 0.05)});
  const double z_single = phi_inv_oracle(0.95);
  EXPECT_NEAR(z_single, 1.644854, 1e-6);
  EXPECT_NEAR(c.z, std::sqrt(2.0) * z_single, 1e-9);
  EXPECT_NEAR(c.z, 2.32617, 1e-5);
  EXPECT_NEAR(c.p_value, 0.0100, 5e-4);
}

TEST(Stouffer, WeightsAndReplication) {
  Rng rng(9);
  std::uniform_int_distribution<std::size_t> sizes(2, 200);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DatasetStat> v;
    for (int k = 0; k < 1 + trial % 7; ++k) v.push_back(stat(sizes(rng), 0.2));
    const auto c = stouffer_combine(v);
    double s = 0;
    for (double w : c.weights) s += w * w;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  const double z1 = -phi_inv(0.2);
  std::vector<DatasetStat> same(4, stat(11, 0.2));
  EXPECT_NEAR(stouffer_combine(same).z, 2.0 * z1, 1e-12);
}

TEST(Stouffer, ClampAndUndefinedEffect) {
  const auto c = stouffer_combine({stat(5, 1.0), stat(5, 0.2, std::nullopt)});
  EXPECT_TRUE(c.clamped);
  EXPECT_TRUE(std::isfinite(c.z));
  EXPECT_GT(c.p_value, 0.0);
  EXPECT_LE(c.p_value, 1.0);
  EXPECT_FALSE(c.combined_smd.has_value());
}

}  // namespace
}  // namespace eegbench::stats
