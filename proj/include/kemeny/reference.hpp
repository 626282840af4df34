#pragma once

// Published reference values the harness compares against.

#include <optional>
#include <span>
#include <string_view>

namespace kemeny::reference {

struct DistanceRow {
  int n;
  double mean;
  double sigma;
  double excess_kurtosis;
};

/// Distance characterisation table; rows for n <= 8 come from exhaustive
/// enumeration, larger n were sampled.
std::span<const DistanceRow> distance_table();
std::optional<DistanceRow> distance_row(int n);

struct StatRow {
  std::string_view estimator;
  double mean;
  double sd;
};

struct SizedRows {
  int n;
  std::span<const StatRow> rows;
};

/// Kendall and Kemeny z statistics under tied data.
std::span<const SizedRows> tied_z_table();
/// Spearman-family z statistics on the resampled ordinal population.
std::span<const SizedRows> spearman_z_table();
/// Estimator spreads under independence.
std::span<const SizedRows> correlation_table();

std::optional<StatRow> lookup(std::span<const SizedRows> table, int n, std::string_view estimator);

/// Spearman rho of the resampled ordinal population.
constexpr double kOrdinalSpearman = -0.3706851;
/// Reported 2.5% / 97.5% null quantiles of z at n = 15.
constexpr double kNullQuantileLow = -1.849937;
constexpr double kNullQuantileHigh = 1.850131;

}  // namespace kemeny::reference
