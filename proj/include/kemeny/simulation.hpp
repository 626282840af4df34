#pragma once

// Seeded Monte Carlo experiments. Every replication draws from its own RNG
// stream keyed by (seed, n, replication), so reports do not depend on the
// number of workers.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kemeny {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr int kDefaultReps = 2000;

enum class Experiment { table_correlations, table1, table3, table5, null_calibration };

std::string_view experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class PopulationKind {
  default_for_experiment,
  bivariate_normal,
  discretized_normal,
  resample,
  uniform_ties,  // iid draws from {1..n}^n
};

struct Population {
  PopulationKind kind = PopulationKind::default_for_experiment;
  double rho = 0.0;
  int levels = 5;
  std::string file;  // resample source: first two columns are used
};

/// "normal:RHO", "discrete:RHO:LEVELS", "resample:PATH", "ties".
Population parse_population(std::string_view spec);
std::string describe(const Population& p);

struct SimulationConfig {
  Experiment experiment = Experiment::table_correlations;
  std::vector<int> n_values;
  int replications = kDefaultReps;
  Population population;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
};

/// Population the experiment actually uses once defaults are filled in.
Population resolved_population(const SimulationConfig& config);

/// Canonical text of the config without the worker count.
std::string canonical_config(const SimulationConfig& config);
std::uint64_t config_hash(const SimulationConfig& config);

struct SummaryRow {
  std::string estimator;
  double mean = 0.0;
  double sd = 0.0;  // divisor n - 1
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double range = 0.0;
  double skew = 0.0;             // biased g1
  double excess_kurtosis = 0.0;  // biased g2
  std::optional<double> reference_mean;
  std::optional<double> reference_sd;
};

SummaryRow summarize(std::string estimator, std::vector<double> values);

struct SizeBlock {
  int n = 0;
  std::vector<SummaryRow> rows;
  std::map<std::string, double> extras;
};

struct SimulationReport {
  SimulationConfig config;
  Population population;
  std::uint64_t hash = 0;
  std::vector<SizeBlock> blocks;

  const SizeBlock* block(int n) const;
  const SummaryRow* row(int n, std::string_view estimator) const;
};

SimulationReport run_simulation(const SimulationConfig& config);

std::string render_text(const SimulationReport& report);
std::string render_json(const SimulationReport& report);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Independent stream for one replication.
std::mt19937_64 replication_rng(std::uint64_t seed, int n, int replication);

/// Latent normal correlation whose Spearman rho equals rho_s:
/// 2 sin(pi rho_s / 6).
double normal_rho_for_spearman(double rho_s);

}  // namespace kemeny
