#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fuzz.hpp"
#include "kemeny/errors.hpp"
#include "kemeny/rank_core.hpp"

using namespace kemeny;
using kemeny::testing::is_constant;
using kemeny::testing::random_size;
using kemeny::testing::random_strict;
using kemeny::testing::random_values;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kFuzzCases = 10000;

// Average-rank Spearman written from the textbook definition.
double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<long double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      long double below = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] < v[i]) ++below;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = below + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const long double mean = (n + 1) / 2.0L;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::int64_t oracle_discordant(const std::vector<double>& x, const std::vector<double>& y) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if ((x[i] - x[j]) * (y[i] - y[j]) < 0) ++d;
    }
  }
  return d;
}

// Strictly increasing map that also sends the extremes to -inf / +inf.
std::vector<double> monotone_image(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == *lo) {
      out[i] = -kInf;
    } else if (v[i] == *hi) {
      out[i] = kInf;
    } else {
      out[i] = std::isfinite(v[i]) ? std::atan(v[i]) * 7.0 + 2.0 : v[i];
    }
  }
  return out;
}

}  // namespace

TEST(ScoreVector, RejectsNaNAndShortInput) {
  EXPECT_THROW(ScoreVector({1.0, std::nan("")}), InvalidInputError);
  EXPECT_THROW(ScoreVector({1.0}), SizeError);
  EXPECT_NO_THROW(ScoreVector({-kInf, kInf}));
}

TEST(PairSigns, Examples) {
  EXPECT_EQ(pair_signs(ScoreVector{1, 2}).codes, (std::vector<std::int8_t>{-1}));
  EXPECT_EQ(pair_signs(ScoreVector{5, 5, 5}).codes, (std::vector<std::int8_t>{0, 0, 0}));
  EXPECT_EQ(pair_signs(ScoreVector{1, -kInf, kInf}).codes, (std::vector<std::int8_t>{1, -1, -1}));
}

TEST(PairSigns, SkewSymmetricReconstruction) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto v = random_values(rng, random_size(rng));
    const auto s = pair_signs(ScoreVector(v));
    ASSERT_EQ(s.codes.size(), static_cast<std::size_t>(pair_count(v.size())));
    for (std::size_t k = 0; k < v.size(); ++k) {
      EXPECT_EQ(s.at(k, k), 0);
      for (std::size_t l = 0; l < v.size(); ++l) EXPECT_EQ(s.at(k, l), -s.at(l, k));
    }
  }
}

TEST(PairStats, Examples) {
  const auto a = pair_stats(ScoreVector{1, 2, 3}, ScoreVector{1, 1, 2});
  EXPECT_EQ(a.concordant, 2);
  EXPECT_EQ(a.discordant, 0);
  EXPECT_EQ(a.tied_x, 0);
  EXPECT_EQ(a.tied_y, 1);
  EXPECT_EQ(a.tied_xy, 0);
  const auto b = pair_stats(ScoreVector{1, 2, 3}, ScoreVector{3, 2, 1});
  EXPECT_EQ(b.concordant, 0);
  EXPECT_EQ(b.discordant, 3);
  EXPECT_EQ(pair_stats(ScoreVector{1, 1}, ScoreVector{2, 2}).tied_xy, 1);
  EXPECT_THROW(pair_stats(ScoreVector{1, 2}, ScoreVector{1, 2, 3}), ShapeError);
}

TEST(PairStats, MergeMatchesQuadratic) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 2000; ++t) {
    const auto n = random_size(rng, 2, 300);
    const ScoreVector x(random_values(rng, n));
    const ScoreVector y(random_values(rng, n));
    const auto q = pair_stats_quadratic(x, y);
    const auto m = pair_stats_merge(x, y);
    ASSERT_EQ(q, m) << "n=" << n;
    EXPECT_EQ(q.concordant + q.discordant + q.tied_x + q.tied_y + q.tied_xy, q.pairs);
  }
}

TEST(Distances, Examples) {
  EXPECT_EQ(kemeny_distance_affine(ScoreVector{1, 2, 3}, ScoreVector{3, 2, 1}), 6.0);
  EXPECT_EQ(kemeny_distance_affine(ScoreVector{1, 2}, ScoreVector{1, 1}), 1.0);
  EXPECT_EQ(kemeny_distance_affine(ScoreVector{1, 1}, ScoreVector{1, 1}), 1.0);
  EXPECT_EQ(kemeny_distance_exact(ScoreVector{1, 1}, ScoreVector{1, 1}), 0.0);
  EXPECT_EQ(kemeny_distance_exact(ScoreVector{1, 2}, ScoreVector{2, 1}), 2.0);
  EXPECT_EQ(kemeny_distance_exact(ScoreVector{1, 2}, ScoreVector{1, 1}), 1.0);
}

TEST(KemenyTau, Examples) {
  EXPECT_EQ(kemeny_tau(ScoreVector{3, 1, 2}, ScoreVector{3, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(kemeny_tau(ScoreVector{1, 2, 3}, ScoreVector{1, 1, 2}), 2.0 / 3.0);
  EXPECT_EQ(kemeny_tau(ScoreVector{1, 2, 3}, ScoreVector{4, 4, 4}), 0.0);
}

TEST(KemenyVariance, Examples) {
  EXPECT_EQ(kemeny_variance(ScoreVector{5, 5, 5}), 0.0);
  EXPECT_EQ(kemeny_variance(ScoreVector{1, 2, 3, 4}), 6.0);
  EXPECT_EQ(kemeny_variance(ScoreVector{1, 1, 2}), 2.0);
}

TEST(RankVector, Examples) {
  const double s = std::sqrt(0.5);
  const auto a = rank_vector(ScoreVector{1, 2, 3}).values();
  EXPECT_DOUBLE_EQ(a[0], 2 * s);
  EXPECT_DOUBLE_EQ(a[1], 0.0);
  EXPECT_DOUBLE_EQ(a[2], -2 * s);
  const auto b = rank_vector(ScoreVector{7, 7, 7}).counts;
  EXPECT_EQ(b, (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_EQ(rank_vector(ScoreVector{1, 1, 2}).counts, (std::vector<std::int64_t>{1, 1, -2}));
}

TEST(RankVector, SumsToZeroAndStrictLayout) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 500; ++t) {
    const auto n = random_size(rng);
    const auto rv = rank_vector(ScoreVector(random_values(rng, n)));
    std::int64_t sum = 0;
    for (const auto c : rv.counts) sum += c;
    EXPECT_EQ(sum, 0);
    auto strict = rank_vector(ScoreVector(random_strict(rng, n))).counts;
    std::sort(strict.begin(), strict.end(), std::greater<>());
    for (std::size_t r = 1; r <= n; ++r) {
      EXPECT_EQ(strict[r - 1], static_cast<std::int64_t>(n + 1 - 2 * r));
    }
  }
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman_rho(ScoreVector{1, 2, 3}, ScoreVector{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(spearman_rho(ScoreVector{1, 2, 3}, ScoreVector{3, 2, 1}), -1.0);
  EXPECT_THROW(spearman_rho(ScoreVector{1, 2, 3}, ScoreVector{2, 2, 2}), DegenerateError);
  EXPECT_DOUBLE_EQ(spearman_distance_from_rho(1.0), 0.0);
  EXPECT_DOUBLE_EQ(spearman_distance_from_rho(-1.0), 2.0);
  EXPECT_DOUBLE_EQ(spearman_distance_from_rho(0.5), 1.0);
  EXPECT_DOUBLE_EQ(arcsine_from_rho(0.0), 0.0);
  EXPECT_DOUBLE_EQ(arcsine_from_rho(1.0), 1.0);
  EXPECT_NEAR(arcsine_from_rho(0.5), 1.0 / 3.0, 1e-15);
}

TEST(Spearman, MatchesMidrankOracleOnFuzz) {
  std::mt19937_64 rng(14);
  int checked = 0;
  while (checked < kFuzzCases) {
    const auto n = random_size(rng, 2, 60);
    const auto x = random_values(rng, n, false);
    const auto y = random_values(rng, n, false);
    if (is_constant(x) || is_constant(y)) continue;
    ++checked;
    const double rho = spearman_rho(ScoreVector(x), ScoreVector(y));
    ASSERT_NEAR(rho, oracle_spearman(x, y), 1e-12);
    ASSERT_NEAR(rho, midrank_spearman(ScoreVector(x), ScoreVector(y)), 1e-12);
  }
}

TEST(KendallB, Examples) {
  EXPECT_NEAR(kendall_tau_b(ScoreVector{1, 2, 3}, ScoreVector{1, 1, 2}), 2.0 / std::sqrt(6.0), 1e-15);
  EXPECT_DOUBLE_EQ(kendall_tau_b(ScoreVector{1, 1, 2, 3}, ScoreVector{1, 1, 2, 3}), 1.0);
  EXPECT_THROW(kendall_tau_b(ScoreVector{1, 1}, ScoreVector{1, 2}), DegenerateError);
}

TEST(GreinerSin, Examples) {
  EXPECT_DOUBLE_EQ(greiner_sin(1.0), 1.0);
  EXPECT_DOUBLE_EQ(greiner_sin(0.0), 0.0);
  EXPECT_NEAR(greiner_sin(0.5), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_THROW(greiner_sin(1.5), DomainError);
}

TEST(Identities, FuzzedExactIdentities) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < kFuzzCases; ++t) {
    const auto n = random_size(rng, 2, 90);
    const auto xv = random_values(rng, n);
    const auto yv = random_values(rng, n);
    const ScoreVector x(xv), y(yv);
    const auto c = pair_stats(x, y);
    const double m = static_cast<double>(c.pairs);
    const double affine = kemeny_distance_affine(x, y);
    ASSERT_EQ(kemeny_tau(x, y), (c.concordant - c.discordant) / m);
    ASSERT_EQ(affine, m + c.discordant - c.concordant);
    ASSERT_NEAR(kemeny_tau(x, y), 1.0 - affine / m, 1e-15);
    ASSERT_EQ(affine, kemeny_distance_exact(x, y) + static_cast<double>(c.tied_xy));
    ASSERT_GE(affine, 0.0);
    ASSERT_LE(affine, 2.0 * m);
    ASSERT_LE(std::abs(kemeny_tau(x, y)), 1.0);
    ASSERT_GE(kemeny_variance(x), 0.0);
    ASSERT_LE(kemeny_variance(x), m);
  }
}

TEST(Identities, TieFreeKendallRelations) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < kFuzzCases; ++t) {
    const auto n = random_size(rng, 2, 90);
    const auto xv = random_strict(rng, n);
    const auto yv = random_strict(rng, n);
    const ScoreVector x(xv), y(yv);
    ASSERT_EQ(static_cast<double>(oracle_discordant(xv, yv)), 0.5 * kemeny_distance_affine(x, y));
    ASSERT_EQ(kendall_tau_b(x, y), kemeny_tau(x, y));
    ASSERT_EQ(kemeny_variance(x), static_cast<double>(pair_count(n)));
  }
}

TEST(Properties, SymmetryAndOrderInvariance) {
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < kFuzzCases) {
    const auto n = random_size(rng, 3, 50);
    const auto xv = random_values(rng, n);
    const auto yv = random_values(rng, n);
    if (is_constant(xv) || is_constant(yv)) continue;
    ++checked;
    const ScoreVector x(xv), y(yv);
    const ScoreVector fx(monotone_image(xv)), gy(monotone_image(yv));
    ASSERT_EQ(kemeny_tau(x, y), kemeny_tau(y, x));
    ASSERT_EQ(kemeny_distance_affine(x, y), kemeny_distance_affine(y, x));
    ASSERT_EQ(kemeny_distance_exact(x, y), kemeny_distance_exact(y, x));
    ASSERT_EQ(spearman_rho(x, y), spearman_rho(y, x));
    ASSERT_EQ(kendall_tau_b(x, y), kendall_tau_b(y, x));
    ASSERT_EQ(pair_stats(x, y), pair_stats(fx, gy));
    ASSERT_EQ(spearman_rho(x, y), spearman_rho(fx, gy));
    ASSERT_EQ(kendall_tau_b(x, y), kendall_tau_b(fx, gy));
    ASSERT_EQ(arcsine_r(x, y), arcsine_r(fx, gy));
    ASSERT_EQ(kemeny_variance(x), kemeny_variance(fx));
  }
}

TEST(Properties, ExactDistanceIsAMetric) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < kFuzzCases; ++t) {
    const auto n = random_size(rng, 2, 25);
    const ScoreVector a(random_values(rng, n)), b(random_values(rng, n)), c(random_values(rng, n));
    ASSERT_EQ(kemeny_distance_exact(a, a), 0.0);
    ASSERT_EQ(kemeny_distance_exact(a, b), kemeny_distance_exact(b, a));
    ASSERT_LE(kemeny_distance_exact(a, c), kemeny_distance_exact(a, b) + kemeny_distance_exact(b, c));
  }
}

TEST(Properties, InfinitiesTieWithThemselves) {
  const ScoreVector x{kInf, kInf, -kInf, -kInf, 0};
  const auto blocks = tie_blocks(x);
  EXPECT_EQ(blocks, (std::vector<std::int64_t>{2, 1, 2}));
  EXPECT_EQ(kemeny_variance(x), 8.0);
  EXPECT_THROW(pearson_r(x.values(), x.values()), InvalidInputError);
  EXPECT_DOUBLE_EQ(spearman_rho(x, x), 1.0);
}
