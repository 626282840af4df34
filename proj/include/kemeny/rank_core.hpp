#pragma once

// Pairwise-order kernels over extended-real score vectors.
//
// Every estimator here depends on its inputs only through the signs
// sign(x_k - x_l) of the unordered pairs, so all of them are invariant
// under strictly increasing transforms (including maps to +/-inf).

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace kemeny {

/// Length-n vector over the extended reals. NaN is rejected; +inf ties
/// with +inf and -inf ties with -inf. Requires n >= 2.
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<double> values);
  ScoreVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Number of unordered pairs, (n^2 - n) / 2.
constexpr std::int64_t pair_count(std::size_t n) {
  return static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
}

/// Upper-triangle sign codes of the skew-symmetric order matrix.
/// codes[index(k, l)] = sign(x_k - x_l) for k < l. The constant sqrt(0.5)
/// scale of the order matrix is never stored.
struct PairSigns {
  std::size_t n = 0;
  std::vector<std::int8_t> codes;

  std::size_t index(std::size_t k, std::size_t l) const;
  /// Full-matrix entry in {-1, 0, +1}; skew-symmetric with zero diagonal.
  int at(std::size_t k, std::size_t l) const;
};

/// Pair classes of a bivariate sample. Exactly one class per unordered pair.
struct ConcordanceCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_x = 0;   // tied in x only
  std::int64_t tied_y = 0;   // tied in y only
  std::int64_t tied_xy = 0;  // tied in both
  std::int64_t pairs = 0;

  friend bool operator==(const ConcordanceCounts&, const ConcordanceCounts&) = default;
};

/// Column sums of the order matrix: entry l is
/// sqrt(0.5) * (#{k : x_k > x_l} - #{k : x_k < x_l}).
/// Integer counts are kept; the sqrt(0.5) factor is applied by values().
struct RankVector {
  std::vector<std::int64_t> counts;

  std::vector<double> values() const;
};

PairSigns pair_signs(const ScoreVector& x);

/// Pair classification. Dispatches to the O(n log n) merge path for large n.
ConcordanceCounts pair_stats(const ScoreVector& x, const ScoreVector& y);
/// O(n^2) reference classification.
ConcordanceCounts pair_stats_quadratic(const ScoreVector& x, const ScoreVector& y);
/// O(n log n): lexicographic sort plus merge-sort inversion count, with
/// tie-block bookkeeping.
ConcordanceCounts pair_stats_merge(const ScoreVector& x, const ScoreVector& y);

/// Sizes of the tie blocks of x (blocks of size 1 included), ascending by value.
std::vector<std::int64_t> tie_blocks(const ScoreVector& x);

/// Affine Kemeny distance m + (D - C) in [0, n^2 - n]. Two identical,
/// fully tied vectors sit at distance m, not 0.
double kemeny_distance_affine(const ScoreVector& x, const ScoreVector& y);

/// Kemeny metric: per pair 0 for the same relation, 1 when decided in
/// exactly one vector, 2 when oppositely decided.
double kemeny_distance_exact(const ScoreVector& x, const ScoreVector& y);

/// (C - D) / m.
double kemeny_tau(const ScoreVector& x, const ScoreVector& y);

/// Sum of squared order-matrix entries: the count of untied pairs.
double kemeny_variance(const ScoreVector& x);

RankVector rank_vector(const ScoreVector& x);

/// Normalised inner product of the two rank vectors (sample-sd scaling).
/// Identical to midrank Spearman. Throws DegenerateError on constant input.
double spearman_rho(const ScoreVector& x, const ScoreVector& y);

/// sqrt(2) * sqrt(1 - rho_S), in [0, 2].
double spearman_distance(const ScoreVector& x, const ScoreVector& y);
double spearman_distance_from_rho(double rho);

/// (2 / pi) * asin(rho_S).
double arcsine_r(const ScoreVector& x, const ScoreVector& y);
double arcsine_from_rho(double rho);

/// Tie-corrected Kendall tau_b. Throws DegenerateError on constant input.
double kendall_tau_b(const ScoreVector& x, const ScoreVector& y);

/// sin(pi t / 2) for |t| <= 1. Often quoted as mapping Kendall's tau to a
/// product-moment correlation; applied to Kemeny tau its image behaves like
/// Spearman's rho rather than Pearson's r.
double greiner_sin(double t);

// Classical textbook estimators, kept for comparison rows and oracles.

/// Average ranks (1-based), ties receive the mean of the ranks they span.
std::vector<double> midranks(const ScoreVector& x);
/// Pearson product-moment correlation. Throws on non-finite or constant input.
double pearson_r(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of midranks.
double midrank_spearman(const ScoreVector& x, const ScoreVector& y);

}  // namespace kemeny
