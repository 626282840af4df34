#pragma once

// Brute-force enumeration of the value-vector population {1..n}^n, giving
// exact distributions of the centred Kemeny distance for small n.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kemeny/rational.hpp"

namespace kemeny {

constexpr int kMinEnumerationN = 2;
constexpr int kMaxEnumerationN = 8;

/// n^n. Throws RangeError outside [2, 8].
std::uint64_t population_size(int n);

/// Calls visit(v) for every v in {1..n}^n in odometer order (last coordinate
/// fastest). The span is only valid for the duration of the call.
void enumerate_population(int n, const std::function<void(std::span<const int>)>& visit);

/// Centred distance d_affine(v, reference) - m against the strict reference
/// (1, 2, ..., n); equals D - C.
std::int64_t centred_distance(std::span<const int> v);

struct ExactDistribution {
  int n = 0;
  std::vector<std::int64_t> support;   // ascending, only values with nonzero count
  std::vector<std::uint64_t> counts;
  Rational mean;
  Rational variance;
  Rational std_kurtosis;  // mu4 / mu2^2

  std::uint64_t total() const;
};

/// Exact histogram over the whole population. Work is split by the first
/// coordinate across `workers` threads; the result does not depend on it.
ExactDistribution exact_distance_distribution(int n, int workers = 0);

/// Same, restricted to tie-free vectors (the n! permutations).
ExactDistribution exact_permutation_distribution(int n);

struct ExactMoments {
  Rational variance;
  Rational std_kurtosis;
};

ExactMoments exact_moments(int n, int workers = 0);

}  // namespace kemeny
