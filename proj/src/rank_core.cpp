#include "kemeny/rank_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "kemeny/errors.hpp"

namespace kemeny {

namespace {

constexpr std::size_t kMergeThreshold = 64;

int sign_of(double a, double b) {
  // Total order on the extended reals; NaN never reaches here.
  if (a > b) return 1;
  if (a < b) return -1;
  return 0;
}

void require_same_length(const ScoreVector& x, const ScoreVector& y) {
  if (x.size() != y.size()) {
    throw ShapeError("length mismatch: " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
}

std::vector<std::size_t> sorted_order(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

// Counts pairs i < j with ys[i] > ys[j] while sorting ys ascending.
std::int64_t merge_count_inversions(std::vector<double>& ys) {
  const std::size_t n = ys.size();
  std::vector<double> buffer(n);
  std::int64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
          inversions += static_cast<std::int64_t>(mid - i);
          buffer[k++] = ys[j++];
        } else {
          buffer[k++] = ys[i++];
        }
      }
      while (i < mid) buffer[k++] = ys[i++];
      while (j < hi) buffer[k++] = ys[j++];
    }
    std::swap(ys, buffer);
  }
  return inversions;
}

std::int64_t tied_pairs_in_sorted(std::span<const double> sorted) {
  std::int64_t tied = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    tied += t * (t - 1) / 2;
    i = j;
  }
  return tied;
}

}  // namespace

ScoreVector::ScoreVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw SizeError("score vector needs at least 2 entries, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::isnan(values_[i])) {
      throw InvalidInputError("NaN at position " + std::to_string(i));
    }
  }
}

ScoreVector::ScoreVector(std::initializer_list<double> values)
    : ScoreVector(std::vector<double>(values)) {}

std::size_t PairSigns::index(std::size_t k, std::size_t l) const {
  // Row-major upper triangle without the diagonal.
  return k * n - k * (k + 1) / 2 + (l - k - 1);
}

int PairSigns::at(std::size_t k, std::size_t l) const {
  if (k == l) return 0;
  if (k < l) return codes[index(k, l)];
  return -codes[index(l, k)];
}

std::vector<double> RankVector::values() const {
  std::vector<double> out(counts.size());
  const double scale = std::sqrt(0.5);
  std::transform(counts.begin(), counts.end(), out.begin(),
                 [&](std::int64_t c) { return scale * static_cast<double>(c); });
  return out;
}

PairSigns pair_signs(const ScoreVector& x) {
  PairSigns signs;
  signs.n = x.size();
  signs.codes.reserve(static_cast<std::size_t>(pair_count(x.size())));
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t l = k + 1; l < x.size(); ++l) {
      signs.codes.push_back(static_cast<std::int8_t>(sign_of(x[k], x[l])));
    }
  }
  return signs;
}

ConcordanceCounts pair_stats_quadratic(const ScoreVector& x, const ScoreVector& y) {
  require_same_length(x, y);
  ConcordanceCounts c;
  const std::size_t n = x.size();
  c.pairs = pair_count(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      const int sx = sign_of(x[k], x[l]);
      const int sy = sign_of(y[k], y[l]);
      if (sx == 0 && sy == 0) {
        ++c.tied_xy;
      } else if (sx == 0) {
        ++c.tied_x;
      } else if (sy == 0) {
        ++c.tied_y;
      } else if (sx == sy) {
        ++c.concordant;
      } else {
        ++c.discordant;
      }
    }
  }
  return c;
}

ConcordanceCounts pair_stats_merge(const ScoreVector& x, const ScoreVector& y) {
  require_same_length(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  std::int64_t tied_x_all = 0;
  std::int64_t tied_xy = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    tied_x_all += t * (t - 1) / 2;
    // Within an x block, y is sorted, so joint ties are contiguous.
    std::size_t a = i;
    while (a < j) {
      std::size_t b = a + 1;
      while (b < j && y[order[b]] == y[order[a]]) ++b;
      const auto u = static_cast<std::int64_t>(b - a);
      tied_xy += u * (u - 1) / 2;
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(n);
  for (std::size_t k = 0; k < n; ++k) ys[k] = y[order[k]];
  const std::int64_t discordant = merge_count_inversions(ys);
  const std::int64_t tied_y_all = tied_pairs_in_sorted(ys);

  ConcordanceCounts c;
  c.pairs = pair_count(n);
  c.discordant = discordant;
  c.tied_xy = tied_xy;
  c.tied_x = tied_x_all - tied_xy;
  c.tied_y = tied_y_all - tied_xy;
  c.concordant = c.pairs - c.discordant - c.tied_x - c.tied_y - c.tied_xy;
  return c;
}

ConcordanceCounts pair_stats(const ScoreVector& x, const ScoreVector& y) {
  if (x.size() >= kMergeThreshold) return pair_stats_merge(x, y);
  return pair_stats_quadratic(x, y);
}

std::vector<std::int64_t> tie_blocks(const ScoreVector& x) {
  std::vector<double> sorted(x.values().begin(), x.values().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::int64_t> blocks;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    blocks.push_back(static_cast<std::int64_t>(j - i));
    i = j;
  }
  return blocks;
}

double kemeny_distance_affine(const ScoreVector& x, const ScoreVector& y) {
  const auto c = pair_stats(x, y);
  return static_cast<double>(c.pairs + c.discordant - c.concordant);
}

double kemeny_distance_exact(const ScoreVector& x, const ScoreVector& y) {
  const auto c = pair_stats(x, y);
  return static_cast<double>(2 * c.discordant + c.tied_x + c.tied_y);
}

double kemeny_tau(const ScoreVector& x, const ScoreVector& y) {
  const auto c = pair_stats(x, y);
  return static_cast<double>(c.concordant - c.discordant) / static_cast<double>(c.pairs);
}

double kemeny_variance(const ScoreVector& x) {
  std::int64_t tied = 0;
  for (const auto t : tie_blocks(x)) tied += t * (t - 1) / 2;
  return static_cast<double>(pair_count(x.size()) - tied);
}

RankVector rank_vector(const ScoreVector& x) {
  const std::size_t n = x.size();
  const auto order = sorted_order(x.values());
  RankVector rv;
  rv.counts.assign(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    // i entries are smaller, n - j are larger.
    const auto count = static_cast<std::int64_t>(n - j) - static_cast<std::int64_t>(i);
    for (std::size_t k = i; k < j; ++k) rv.counts[order[k]] = count;
    i = j;
  }
  return rv;
}

double spearman_rho(const ScoreVector& x, const ScoreVector& y) {
  require_same_length(x, y);
  const auto a = rank_vector(x);
  const auto b = rank_vector(y);
  __int128 ab = 0;
  __int128 aa = 0;
  __int128 bb = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ab += static_cast<__int128>(a.counts[i]) * b.counts[i];
    aa += static_cast<__int128>(a.counts[i]) * a.counts[i];
    bb += static_cast<__int128>(b.counts[i]) * b.counts[i];
  }
  if (aa == 0 || bb == 0) throw DegenerateError("spearman_rho: constant input has zero rank spread");
  const double rho = static_cast<double>(ab) /
                     (std::sqrt(static_cast<double>(aa)) * std::sqrt(static_cast<double>(bb)));
  return std::clamp(rho, -1.0, 1.0);
}

double spearman_distance_from_rho(double rho) {
  return std::sqrt(2.0) * std::sqrt(std::max(0.0, 1.0 - rho));
}

double spearman_distance(const ScoreVector& x, const ScoreVector& y) {
  return spearman_distance_from_rho(spearman_rho(x, y));
}

double arcsine_from_rho(double rho) {
  return 2.0 / std::numbers::pi * std::asin(std::clamp(rho, -1.0, 1.0));
}

double arcsine_r(const ScoreVector& x, const ScoreVector& y) {
  return arcsine_from_rho(spearman_rho(x, y));
}

double kendall_tau_b(const ScoreVector& x, const ScoreVector& y) {
  const auto c = pair_stats(x, y);
  const std::int64_t untied_x = c.pairs - c.tied_x - c.tied_xy;
  const std::int64_t untied_y = c.pairs - c.tied_y - c.tied_xy;
  if (untied_x == 0 || untied_y == 0) {
    throw DegenerateError("kendall_tau_b: constant input");
  }
  return static_cast<double>(c.concordant - c.discordant) /
         std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
}

double greiner_sin(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw DomainError("greiner_sin: argument must lie in [-1, 1]");
  }
  return std::sin(std::numbers::pi * t / 2.0);
}

std::vector<double> midranks(const ScoreVector& x) {
  const std::size_t n = x.size();
  const auto order = sorted_order(x.values());
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("pearson_r: length mismatch");
  if (x.size() < 2) throw SizeError("pearson_r: need at least 2 observations");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InvalidInputError("pearson_r: undefined for non-finite values");
    }
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson_r: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double midrank_spearman(const ScoreVector& x, const ScoreVector& y) {
  require_same_length(x, y);
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson_r(rx, ry);
}

}  // namespace kemeny
