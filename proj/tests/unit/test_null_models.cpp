#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuzz.hpp"
#include "kemeny/errors.hpp"
#include "kemeny/null_models.hpp"

using namespace kemeny;
using kemeny::testing::random_size;
using kemeny::testing::random_strict;
using kemeny::testing::random_values;

namespace {

// Standardized kurtosis of BetaBinomial(K, a, a) by direct summation.
double oracle_bb_kurtosis(int K, double a) {
  std::vector<long double> w(K + 1);
  long double total = 0;
  for (int k = 0; k <= K; ++k) {
    const double lw = std::lgamma(K + 1.0) - std::lgamma(k + 1.0) - std::lgamma(K - k + 1.0) +
                      std::lgamma(k + a) + std::lgamma(K - k + a) - std::lgamma(K + 2 * a);
    w[k] = std::exp(static_cast<long double>(lw));
    total += w[k];
  }
  const long double mean = K / 2.0L;
  long double m2 = 0, m4 = 0;
  for (int k = 0; k <= K; ++k) {
    const long double d = k - mean;
    m2 += w[k] / total * d * d;
    m4 += w[k] / total * d * d * d * d;
  }
  return static_cast<double>(m4 / (m2 * m2));
}

}  // namespace

TEST(PopulationVariance, Examples) {
  EXPECT_EQ(population_variance(2), Rational(1, 2));
  EXPECT_EQ(population_variance(3), Rational(70, 27));
  EXPECT_EQ(population_variance(4), Rational(7));
  EXPECT_NEAR(std::sqrt(to_double(population_variance(3))), 1.6102, 5e-5);
  EXPECT_THROW(population_variance(1), DomainError);
}

TEST(FittedCurves, Examples) {
  EXPECT_NEAR(variance_poly(10), 120.197, 5e-4);
  EXPECT_NEAR(kurtosis_poly(10), -std::exp(0.02939 - 0.5537 - 1.149), 1e-12);
  EXPECT_NEAR(kurtosis_poly(10), -0.1877, 5e-4);
  EXPECT_THROW(variance_poly(8), DomainError);
  EXPECT_THROW(kurtosis_poly(8), DomainError);
}

TEST(Alpha, Examples) {
  EXPECT_EQ(alpha_of_n(3), Rational(173, 59));
  // 3 (576 - 64 - 56 + 8) / (2 * 2 * 96) = 1392 / 384.
  EXPECT_EQ(alpha_of_n(4), Rational(29, 8));
  EXPECT_THROW(alpha_of_n(2), DomainError);
  EXPECT_NEAR(to_double(alpha_of_n(4000)) / 4000.0, 9.0 / 8.0, 1e-3);
  EXPECT_DOUBLE_EQ(alpha_from_kurtosis(2.0), 0.5);
  EXPECT_NEAR(alpha_from_kurtosis(9.0 / 5.0), 0.0, 1e-15);
  EXPECT_GT(alpha_from_kurtosis(3.0 - 1e-9), 1e8);
  EXPECT_THROW(alpha_from_kurtosis(3.0), DomainError);
  for (const double a : {0.3, 1.0, 7.5, 120.0}) {
    EXPECT_NEAR(alpha_from_kurtosis(kurtosis_from_alpha(a)), a, 1e-9 * a);
  }
}

TEST(QFromMoments, Examples) {
  EXPECT_DOUBLE_EQ(q_from_moments(1.0, 2.0), 2.0);
  EXPECT_GT(q_from_moments(1.0, 3.0 - 1e-10), 1e4);
  EXPECT_THROW(q_from_moments(1.0, 3.0), DomainError);
  EXPECT_THROW(q_from_moments(0.0, 1.0), DomainError);
  EXPECT_THROW(q_from_moments(1.0, -1.0), DomainError);
}

TEST(NullTable, PropertiesAcrossSizes) {
  double previous = 0.0;
  for (int n = 3; n <= 50; ++n) {
    const auto t = null_pmf(n);
    ASSERT_EQ(t.m, pair_count(n));
    ASSERT_EQ(t.pmf.size(), static_cast<std::size_t>(2 * t.m + 1));
    double total = 0.0;
    for (const double p : t.pmf) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12) << n;
    for (std::int64_t x = 0; x <= t.m; ++x) ASSERT_EQ(t.probability(x), t.probability(-x)) << n;
    EXPECT_LT(t.max_abs_odd_moment(), 1e-10) << n;
    const double k4 = t.standardized_kurtosis();
    EXPECT_LT(k4, 3.0) << n;
    if (n > 5) EXPECT_GT(k4, previous) << n;
    previous = k4;
  }
}

TEST(NullTable, TailsAndQuantiles) {
  const auto t = null_pmf(15);
  EXPECT_NEAR(t.mid_upper_tail(0), 0.5, 1e-14);
  EXPECT_NEAR(t.upper_tail(-t.m), 1.0, 1e-14);
  EXPECT_EQ(t.quantile(0.025), -t.quantile(0.975));
  EXPECT_NEAR(t.variance(), to_double(population_variance(15)), 1.0);
  EXPECT_EQ(cached_null_pmf(15)->pmf, t.pmf);
  EXPECT_EQ(cached_null_pmf(15).get(), cached_null_pmf(15).get());
}

TEST(NullTable, JsonLayout) {
  const auto json = null_table_json(null_pmf(3));
  EXPECT_EQ(json.rfind("{\"n\":3,\"m\":3,\"alpha\":", 0), 0u) << json;
  EXPECT_NE(json.find("\"support\":[-3,-2,-1,0,1,2,3]"), std::string::npos) << json;
  EXPECT_NE(json.find("\"probabilities\":["), std::string::npos);
}

TEST(ZKemeny, Examples) {
  const ScoreVector x{1, 2, 3, 4, 5, 6};
  const auto same = z_kemeny(x, x);
  EXPECT_DOUBLE_EQ(same.statistic, 15.0 / std::sqrt(to_double(population_variance(6))));
  EXPECT_GT(same.statistic, 0.0);
  EXPECT_NE(same.kemeny_null, nullptr);

  const auto zero = z_kemeny(ScoreVector{1, 2, 3}, ScoreVector{2, 1, 2});
  EXPECT_EQ(zero.statistic, 0.0);
  EXPECT_DOUBLE_EQ(zero.p_two_sided, 1.0);
  EXPECT_DOUBLE_EQ(z_kemeny(ScoreVector{1, 2, 3}, ScoreVector{2, 1, 2}, {NullKind::normal}).p_two_sided, 1.0);

  EXPECT_THROW(z_kemeny(ScoreVector{1, 2}, ScoreVector{1, 2}), SizeError);
  EXPECT_THROW(z_kemeny(ScoreVector{1, 2, 3}, ScoreVector{1, 1, 1}), DegenerateError);
  EXPECT_THROW(z_kemeny(ScoreVector{1, 2, 3}, ScoreVector{1, 2, 3, 4}), ShapeError);
}

TEST(ZKemeny, StatisticIsScaledTau) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const auto n = random_size(rng, 3, 40);
    const auto xv = random_values(rng, n);
    const auto yv = random_values(rng, n);
    if (kemeny::testing::is_constant(xv) || kemeny::testing::is_constant(yv)) continue;
    const ScoreVector x(xv), y(yv);
    const double sigma = std::sqrt(to_double(population_variance(static_cast<int>(n))));
    const auto r = z_kemeny(x, y);
    EXPECT_NEAR(r.statistic, pair_count(n) * kemeny_tau(x, y) / sigma, 1e-12);
    EXPECT_GE(r.p_one_sided, 0.0);
    EXPECT_LE(r.p_one_sided, 1.0);
    EXPECT_NEAR(r.p_two_sided, 2.0 * std::min(r.p_one_sided, 1.0 - r.p_one_sided), 1e-15);
    const auto ps = z_kemeny(x, y, {NullKind::normal, KemenyScale::per_sample});
    EXPECT_NEAR(ps.statistic * std::sqrt(kemeny_variance(x) * kemeny_variance(y)) / pair_count(n),
                r.statistic, 1e-12);
  }
}

TEST(ZKendallB, Examples) {
  std::vector<double> up(10), down(10);
  for (int i = 0; i < 10; ++i) {
    up[i] = i;
    down[i] = -i;
  }
  EXPECT_DOUBLE_EQ(kendall_b_variance(ScoreVector(up), ScoreVector(down)), 125.0);
  EXPECT_NEAR(z_kendall_b(ScoreVector(up), ScoreVector(down)).statistic, -45.0 / std::sqrt(125.0), 1e-12);
  EXPECT_NEAR(z_kendall_b(ScoreVector(up), ScoreVector(down)).statistic, -4.0249, 5e-5);
  EXPECT_THROW(z_kendall_b(ScoreVector{1, 2, 3}, ScoreVector{1, 1, 1}), DegenerateError);
}

TEST(ZKendallB, TieFreeMatchesClassicalFormula) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 1000; ++t) {
    const auto n = random_size(rng, 3, 80);
    const ScoreVector x(random_strict(rng, n)), y(random_strict(rng, n));
    const auto c = pair_stats(x, y);
    const double dn = static_cast<double>(n);
    const double classical = 3.0 * (c.concordant - c.discordant) / std::sqrt(dn * (dn - 1) * (2 * dn + 5) / 2.0);
    EXPECT_NEAR(z_kendall_b(x, y).statistic, classical, 1e-12);
  }
}

TEST(ZSpearman, Scaling) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto n = random_size(rng, 3, 60);
    const ScoreVector x(random_strict(rng, n)), y(random_strict(rng, n));
    const double rho = spearman_rho(x, y);
    const double s = std::sqrt(static_cast<double>(n) - 1.0);
    const auto r = z_spearman(x, y);
    EXPECT_NEAR(r.statistic, rho * s, 1e-12);
    EXPECT_NEAR(z_spearman(x, y, {NullKind::normal, true}).statistic, rho / s, 1e-12);
    EXPECT_NEAR(r.p_two_sided, 2.0 * std::min(r.p_one_sided, 1.0 - r.p_one_sided), 1e-15);
  }
  // rho = -0.37 at n = 100 sits at z = -0.37 * sqrt(99).
  EXPECT_NEAR(-0.37 * std::sqrt(99.0), -3.68, 0.005);
  const auto zero = z_spearman(ScoreVector{1, 2, 3, 4, 5}, ScoreVector{2, 5, 3, 1, 4}, {NullKind::normal});
  EXPECT_NEAR(zero.statistic, 0.0, 1e-15);
  EXPECT_NEAR(zero.p_two_sided, 1.0, 1e-15);
  EXPECT_THROW(z_spearman(ScoreVector{1, 2}, ScoreVector{1, 2}), SizeError);
}

TEST(Riffled, Reductions) {
  const auto one = riffled_moments(1.0, 2.0, 3.0, 0.25);
  EXPECT_DOUBLE_EQ(one.sigma2, 0.5);
  EXPECT_DOUBLE_EQ(one.mu3, 0.0);
  const auto single = riffled_moments(10.0, 2.0, 2.0, 0.5);
  EXPECT_NEAR(single.sigma2, 0.5 * (90.0 / 5.0 + 72.0 / 5.0 + 19.0), 1e-12);
  EXPECT_THROW(riffled_moments(10.0, 0.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(riffled_moments(10.0, 1.0, 1.0, 1.5), DomainError);
}

TEST(SpearmanKurtosis, Examples) {
  EXPECT_DOUBLE_EQ(spearman_kurtosis_table(10), 2.539668);
  EXPECT_DOUBLE_EQ(spearman_kurtosis_table(2), 1.0);
  EXPECT_NEAR(spearman_kurtosis(10), 2.72828, 5e-6);
  EXPECT_THROW(spearman_kurtosis_table(20), RangeError);
  EXPECT_THROW(spearman_kurtosis_table(1), RangeError);
  // Classical exact value for n = 10 against its closed form.
  EXPECT_NEAR(spearman_kurtosis_classical(10), 3.0 * (25000 - 3800 - 350 + 72) / (25.0 * 10 * 11 * 9), 1e-12);
}

TEST(SpearmanNull, BetaBinomialKurtosisMatchesDirectSum) {
  for (const int K : {4, 10, 35, 165}) {
    for (const double a : {0.7, 3.0, 40.0}) {
      EXPECT_NEAR(symmetric_beta_binomial_kurtosis(K, a), oracle_bb_kurtosis(K, a), 1e-9) << K << " " << a;
    }
  }
}

TEST(SpearmanNull, StandardizedLatticeHitsTarget) {
  for (const int n : {5, 10, 19, 20, 30}) {
    const auto s = spearman_null(n);
    EXPECT_EQ(s.K, (static_cast<std::int64_t>(n) * n * n - n) / 6);
    double total = 0.0;
    for (const double p : s.pmf) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(s.variance(), 1.0, 1e-9);
    EXPECT_NEAR(s.standardized_kurtosis(), s.target_kurtosis, 1e-6) << n;
    EXPECT_NEAR(s.mid_upper_tail(0.0), 0.5, 1e-14);
  }
  EXPECT_DOUBLE_EQ(spearman_null(10).target_kurtosis, 2.539668);
  EXPECT_DOUBLE_EQ(spearman_null(30).target_kurtosis, spearman_kurtosis_classical(30));
}

TEST(Normal, UpperTail) {
  EXPECT_DOUBLE_EQ(normal_upper_tail(0.0), 0.5);
  EXPECT_NEAR(normal_upper_tail(1.959963984540054), 0.025, 1e-12);
}
