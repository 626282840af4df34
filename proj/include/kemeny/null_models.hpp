#pragma once

// Finite-sample null distributions for the Kemeny, Spearman and Kendall
// statistics, with the closed-form moment expressions they are built from.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kemeny/rank_core.hpp"
#include "kemeny/rational.hpp"

namespace kemeny {

/// Population variance of the centred Kemeny distance,
/// (n-1)^2 (n+4) (2n-1) / (18 n). Exact.
Rational population_variance(int n);

/// Cubic fit of the variance, valid for n >= 9.
double variance_poly(int n);
/// Exponential fit of the excess kurtosis, valid for n >= 9.
double kurtosis_poly(int n);

/// Shape exponent of the null PMF as a function of n (n >= 3). Exact.
Rational alpha_of_n(int n);

/// Shape exponent from the standardized kurtosis k4 < 3:
/// (9 - 5 k4) / (2 (k4 - 3)). Positive for 9/5 < k4 < 3.
double alpha_from_kurtosis(double k4);
/// Inverse of alpha_from_kurtosis: 3 (2a + 3) / (2a + 5).
double kurtosis_from_alpha(double alpha);

/// Half-width sqrt(2) sqrt(mu2 mu4 / (3 mu2^2 - mu4)); needs 0 < mu4 < 3 mu2^2.
double q_from_moments(double mu2, double mu4);

/// Symmetric null PMF f(x) proportional to (q^2 - x^2)^alpha on the integer
/// lattice of the centred distance (equivalently C - D), x in [-m, m].
struct NullTable {
  int n = 0;
  std::int64_t m = 0;
  double alpha = 0.0;
  double q = 0.0;
  double sigma2 = 0.0;       // population_variance(n)
  std::vector<double> pmf;   // index i <-> x = i - m

  double probability(std::int64_t x) const;
  std::vector<std::int64_t> support() const;
  /// P(X >= x).
  double upper_tail(std::int64_t x) const;
  /// P(X > x) + P(X = x) / 2.
  double mid_upper_tail(std::int64_t x) const;
  /// Smallest lattice x with P(X <= x) >= p.
  std::int64_t quantile(double p) const;
  double variance() const;
  double standardized_kurtosis() const;
  /// Largest |odd central moment| of order 1, 3, 5 (zero for a symmetric table).
  double max_abs_odd_moment() const;
};

NullTable null_pmf(int n);
/// Memoized null_pmf; safe for concurrent callers.
std::shared_ptr<const NullTable> cached_null_pmf(int n);

std::string null_table_json(const NullTable& table);

/// Mixture ("riffled") Beta-Binomial moments, evaluated from the closed forms.
struct RiffledMoments {
  double m = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double w = 0.0;
  double mu2 = 0.0;
  double mu4 = 0.0;
  double mu3 = 0.0;
  /// 1/2 (m(m-1)/(1+2a1) + (m-1)(m-2)/(1+2a2) + 2m - 1)
  double sigma2 = 0.0;
};

RiffledMoments riffled_moments(double m, double alpha1, double alpha2, double w);

/// Single-shape fourth-moment ratio written in terms of the midpoint m.
double riffled_kurtosis_ratio(double m, double alpha);
/// Single-shape fourth moment with m = (n^2 - n) / 2 substituted.
double riffled_mu4_of_n(int n, double alpha);

/// Cubic fit of the Spearman null kurtosis (any n >= 2).
double spearman_kurtosis(int n);
/// Tabulated Spearman null kurtosis, n in [2, 19].
double spearman_kurtosis_table(int n);
/// Classical exact null kurtosis of tie-free Spearman's rho,
/// 3 (25n^3 - 38n^2 - 35n + 72) / (25 n (n+1) (n-1)).
double spearman_kurtosis_classical(int n);

/// Symmetric Beta-Binomial null for z = rho_S sqrt(n - 1) on the lattice of
/// tie-free Spearman values (K + 1 points, K = (n^3 - n) / 6). The shape is
/// fitted to the target kurtosis; the lattice is standardized to unit variance.
struct SpearmanNull {
  int n = 0;
  std::int64_t K = 0;
  double shape = 0.0;
  double target_kurtosis = 0.0;
  std::vector<double> z;    // ascending
  std::vector<double> pmf;

  double mid_upper_tail(double z0) const;
  double variance() const;
  double standardized_kurtosis() const;
};

/// Standardized kurtosis of a symmetric Beta-Binomial(K, a, a).
double symmetric_beta_binomial_kurtosis(std::int64_t K, double a);

SpearmanNull spearman_null(int n);
std::shared_ptr<const SpearmanNull> cached_spearman_null(int n);

enum class NullKind { lattice, normal };

struct TestResult {
  double estimate = 0.0;
  double statistic = 0.0;
  double p_one_sided = 0.0;  // upper tail: positive association
  double p_two_sided = 0.0;
  std::string method;
  NullKind null = NullKind::normal;
  std::shared_ptr<const NullTable> kemeny_null;     // set for lattice Kemeny tests
  std::shared_ptr<const SpearmanNull> spearman_null;  // set for lattice Spearman tests
};

enum class KemenyScale {
  population,  // sqrt(population_variance(n))
  per_sample,  // sqrt(population_variance(n)) * sqrt(var_x var_y) / m
};

struct KemenyTestOptions {
  NullKind null = NullKind::lattice;
  KemenyScale scale = KemenyScale::population;
};

/// z = (C - D) / sigma = m tau / sigma. Requires n >= 3 and non-constant inputs.
TestResult z_kemeny(const ScoreVector& x, const ScoreVector& y, KemenyTestOptions options = {});

/// Tie-corrected Kendall z with normal p-values.
TestResult z_kendall_b(const ScoreVector& x, const ScoreVector& y);
/// Variance term v of the tie-corrected Kendall z.
double kendall_b_variance(const ScoreVector& x, const ScoreVector& y);

struct SpearmanTestOptions {
  NullKind null = NullKind::lattice;
  /// rho_S / sqrt(n - 1) instead of rho_S * sqrt(n - 1).
  bool as_printed = false;
};

TestResult z_spearman(const ScoreVector& x, const ScoreVector& y, SpearmanTestOptions options = {});

/// Standard normal upper tail.
double normal_upper_tail(double z);

}  // namespace kemeny
