#include "kemeny/enum_oracle.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <thread>

#include "kemeny/errors.hpp"

namespace kemeny {

namespace {

void require_range(int n) {
  if (n < kMinEnumerationN || n > kMaxEnumerationN) {
    throw RangeError("enumeration needs n in [2, 8], got " + std::to_string(n));
  }
}

// Histogram indexed by centred distance + m.
using Histogram = std::vector<std::uint64_t>;

// Walks every vector whose first coordinate is `first`.
void tally_block(int n, int first, Histogram& hist, bool strict_only) {
  const std::int64_t m = static_cast<std::int64_t>(n) * (n - 1) / 2;
  std::vector<int> v(static_cast<std::size_t>(n), 1);
  v[0] = first;
  while (true) {
    bool keep = true;
    if (strict_only) {
      std::vector<int> s(v);
      std::sort(s.begin(), s.end());
      keep = std::adjacent_find(s.begin(), s.end()) == s.end();
    }
    if (keep) ++hist[static_cast<std::size_t>(centred_distance(v) + m)];
    int pos = n - 1;
    while (pos >= 1 && v[static_cast<std::size_t>(pos)] == n) {
      v[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 1) return;
    ++v[static_cast<std::size_t>(pos)];
  }
}

ExactDistribution summarize(int n, const Histogram& hist) {
  const std::int64_t m = static_cast<std::int64_t>(n) * (n - 1) / 2;
  ExactDistribution d;
  d.n = n;
  BigInt s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i] == 0) continue;
    const std::int64_t x = static_cast<std::int64_t>(i) - m;
    d.support.push_back(x);
    d.counts.push_back(hist[i]);
    const BigInt c = hist[i];
    const BigInt bx = x;
    s0 += c;
    s1 += c * bx;
    s2 += c * bx * bx;
    s3 += c * bx * bx * bx;
    s4 += c * bx * bx * bx * bx;
  }
  const Rational mean(s1, s0);
  const Rational e2(s2, s0);
  const Rational e3(s3, s0);
  const Rational e4(s4, s0);
  d.mean = mean;
  d.variance = e2 - mean * mean;
  const Rational mu4 = e4 - 4 * mean * e3 + 6 * mean * mean * e2 - 3 * mean * mean * mean * mean;
  d.std_kurtosis = d.variance == 0 ? Rational(0) : mu4 / (d.variance * d.variance);
  return d;
}

}  // namespace

std::uint64_t ExactDistribution::total() const {
  std::uint64_t t = 0;
  for (const auto c : counts) t += c;
  return t;
}

std::uint64_t population_size(int n) {
  require_range(n);
  std::uint64_t size = 1;
  for (int i = 0; i < n; ++i) size *= static_cast<std::uint64_t>(n);
  return size;
}

void enumerate_population(int n, const std::function<void(std::span<const int>)>& visit) {
  require_range(n);
  std::vector<int> v(static_cast<std::size_t>(n), 1);
  while (true) {
    visit(v);
    int pos = n - 1;
    while (pos >= 0 && v[static_cast<std::size_t>(pos)] == n) {
      v[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) return;
    ++v[static_cast<std::size_t>(pos)];
  }
}

std::int64_t centred_distance(std::span<const int> v) {
  // Reference is strictly increasing, so pair (k, l), k < l, is concordant
  // when v_k < v_l and discordant when v_k > v_l.
  std::int64_t score = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (std::size_t l = k + 1; l < v.size(); ++l) {
      score += (v[k] > v[l]) - (v[k] < v[l]);
    }
  }
  return score;
}

ExactDistribution exact_distance_distribution(int n, int workers) {
  require_range(n);
  const std::int64_t m = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const auto bins = static_cast<std::size_t>(2 * m + 1);
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);

  std::vector<Histogram> partial(static_cast<std::size_t>(n), Histogram(bins, 0));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int first = 1 + w; first <= n; first += workers) {
        tally_block(n, first, partial[static_cast<std::size_t>(first - 1)], false);
      }
    });
  }
  for (auto& t : pool) t.join();

  Histogram hist(bins, 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < bins; ++i) hist[i] += p[i];
  }
  return summarize(n, hist);
}

ExactDistribution exact_permutation_distribution(int n) {
  require_range(n);
  const std::int64_t m = static_cast<std::int64_t>(n) * (n - 1) / 2;
  Histogram hist(static_cast<std::size_t>(2 * m + 1), 0);
  for (int first = 1; first <= n; ++first) tally_block(n, first, hist, true);
  return summarize(n, hist);
}

ExactMoments exact_moments(int n, int workers) {
  const auto d = exact_distance_distribution(n, workers);
  return {d.variance, d.std_kurtosis};
}

}  // namespace kemeny
