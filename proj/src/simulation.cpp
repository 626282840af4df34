#include "kemeny/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "kemeny/csv.hpp"
#include "kemeny/errors.hpp"
#include "kemeny/null_models.hpp"
#include "kemeny/rank_core.hpp"
#include "kemeny/reference.hpp"

namespace kemeny {

namespace {

std::string format_double(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError(std::string("bad ") + what + ": '" + s + "'");
  }
}

struct Pair {
  std::vector<double> x;
  std::vector<double> y;
};

class Sampler {
 public:
  explicit Sampler(const Population& p) : population_(p) {
    if (p.kind == PopulationKind::resample) {
      const auto data = load_csv(p.file);
      if (data.cols() < 2) throw ShapeError("resample file needs at least two columns: " + p.file);
      pool_x_ = data.column(0);
      pool_y_ = data.column(1);
    }
  }

  Pair draw(int n, std::mt19937_64& rng) const {
    Pair out;
    out.x.resize(static_cast<std::size_t>(n));
    out.y.resize(static_cast<std::size_t>(n));
    switch (population_.kind) {
      case PopulationKind::bivariate_normal:
      case PopulationKind::discretized_normal: {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double r = population_.rho;
        const double s = std::sqrt(1.0 - r * r);
        for (int i = 0; i < n; ++i) {
          const double a = normal(rng);
          const double b = r * a + s * normal(rng);
          out.x[static_cast<std::size_t>(i)] = discretize(a);
          out.y[static_cast<std::size_t>(i)] = discretize(b);
        }
        break;
      }
      case PopulationKind::resample: {
        std::uniform_int_distribution<std::size_t> pick(0, pool_x_.size() - 1);
        for (int i = 0; i < n; ++i) {
          const std::size_t k = pick(rng);
          out.x[static_cast<std::size_t>(i)] = pool_x_[k];
          out.y[static_cast<std::size_t>(i)] = pool_y_[k];
        }
        break;
      }
      case PopulationKind::uniform_ties:
      case PopulationKind::default_for_experiment: {
        std::uniform_int_distribution<int> level(1, n);
        for (int i = 0; i < n; ++i) out.x[static_cast<std::size_t>(i)] = level(rng);
        for (int i = 0; i < n; ++i) out.y[static_cast<std::size_t>(i)] = level(rng);
        break;
      }
    }
    return out;
  }

 private:
  // Category index with cuts at k - L/2, k = 1..L-1.
  double discretize(double z) const {
    if (population_.kind != PopulationKind::discretized_normal) return z;
    const int levels = population_.levels;
    int category = 1;
    for (int k = 1; k < levels; ++k) {
      if (z > k - levels / 2.0) ++category;
    }
    return category;
  }

  Population population_;
  std::vector<double> pool_x_;
  std::vector<double> pool_y_;
};

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

// Redraws from the same stream until both margins vary.
Pair draw_nondegenerate(const Sampler& sampler, int n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto pair = sampler.draw(n, rng);
    if (!constant(pair.x) && !constant(pair.y)) return pair;
  }
  throw DegenerateError("population keeps producing constant samples at n=" + std::to_string(n));
}

double sum_squared_rank_differences(const ScoreVector& x, const ScoreVector& y) {
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  double acc = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) acc += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  return acc;
}

std::vector<std::string> estimator_names(Experiment e) {
  switch (e) {
    case Experiment::table_correlations:
      return {"pearson_r", "spearman", "kemeny_rho_s", "kemeny_tau", "kendall_b", "arcsine_r"};
    case Experiment::table1: return {"centred_distance"};
    case Experiment::table3: return {"kendall", "kemeny"};
    case Experiment::table5: return {"spearman_sum_d2", "kemeny_rho_s", "pearson_t"};
    case Experiment::null_calibration: return {"z_kemeny", "kemeny_tau"};
  }
  return {};
}

std::vector<double> replicate(Experiment e, const Sampler& sampler, int n, std::mt19937_64& rng) {
  const KemenyTestOptions normal_null{NullKind::normal, KemenyScale::population};
  if (e == Experiment::table1) {
    auto pair = sampler.draw(n, rng);
    std::vector<double> reference(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) reference[static_cast<std::size_t>(i)] = i + 1;
    const auto c = pair_stats(ScoreVector(pair.x), ScoreVector(reference));
    return {static_cast<double>(c.discordant - c.concordant)};
  }
  const auto pair = draw_nondegenerate(sampler, n, rng);
  const ScoreVector x(pair.x);
  const ScoreVector y(pair.y);
  switch (e) {
    case Experiment::table_correlations:
      return {pearson_r(pair.x, pair.y), midrank_spearman(x, y), spearman_rho(x, y),
              kemeny_tau(x, y),          kendall_tau_b(x, y),    arcsine_r(x, y)};
    case Experiment::table3:
      return {z_kendall_b(x, y).statistic, z_kemeny(x, y, normal_null).statistic};
    case Experiment::table5: {
      const double r = pearson_r(pair.x, pair.y);
      const double t = r * std::sqrt(n - 2.0) / std::sqrt(std::max(1.0 - r * r, 1e-300));
      return {sum_squared_rank_differences(x, y), z_spearman(x, y, {NullKind::normal, false}).statistic, t};
    }
    case Experiment::null_calibration:
      return {z_kemeny(x, y, normal_null).statistic, kemeny_tau(x, y)};
    case Experiment::table1: break;
  }
  return {};
}

double quantile_type7(std::vector<double> sorted, double p) {
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void attach_references(Experiment e, SizeBlock& block) {
  for (auto& row : block.rows) {
    std::optional<reference::StatRow> ref;
    switch (e) {
      case Experiment::table_correlations:
        ref = reference::lookup(reference::correlation_table(), block.n, row.estimator);
        break;
      case Experiment::table3: ref = reference::lookup(reference::tied_z_table(), block.n, row.estimator); break;
      case Experiment::table5:
        ref = reference::lookup(reference::spearman_z_table(), block.n, row.estimator);
        break;
      case Experiment::table1:
        if (const auto d = reference::distance_row(block.n)) {
          row.reference_mean = d->mean;
          row.reference_sd = d->sigma;
        }
        break;
      case Experiment::null_calibration: break;
    }
    if (ref) {
      row.reference_mean = ref->mean;
      row.reference_sd = ref->sd;
    }
  }
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::table_correlations: return "table_correlations";
    case Experiment::table1: return "table1";
    case Experiment::table3: return "table3";
    case Experiment::table5: return "table5";
    case Experiment::null_calibration: return "null_calibration";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::table_correlations, Experiment::table1, Experiment::table3, Experiment::table5,
                 Experiment::null_calibration}) {
    if (experiment_name(e) == name) return e;
  }
  throw InvalidInputError("unknown experiment '" + std::string(name) + "'");
}

Population parse_population(std::string_view spec) {
  Population p;
  const auto parts = split(spec, ':');
  const std::string& head = parts.front();
  if (head == "normal" && parts.size() == 2) {
    p.kind = PopulationKind::bivariate_normal;
    p.rho = parse_number(parts[1], "correlation");
  } else if (head == "discrete" && (parts.size() == 2 || parts.size() == 3)) {
    p.kind = PopulationKind::discretized_normal;
    p.rho = parse_number(parts[1], "correlation");
    if (parts.size() == 3) p.levels = static_cast<int>(parse_number(parts[2], "level count"));
    if (p.levels < 2) throw InvalidInputError("discrete population needs at least 2 levels");
  } else if (head == "resample" && parts.size() >= 2) {
    p.kind = PopulationKind::resample;
    p.file = std::string(spec.substr(head.size() + 1));
  } else if (head == "ties" && parts.size() == 1) {
    p.kind = PopulationKind::uniform_ties;
  } else {
    throw InvalidInputError("bad population spec '" + std::string(spec) + "'");
  }
  if (!(std::abs(p.rho) < 1.0)) throw InvalidInputError("population correlation must lie in (-1, 1)");
  return p;
}

std::string describe(const Population& p) {
  switch (p.kind) {
    case PopulationKind::bivariate_normal: return "normal:" + format_double(p.rho, 7);
    case PopulationKind::discretized_normal:
      return "discrete:" + format_double(p.rho, 7) + ":" + std::to_string(p.levels);
    case PopulationKind::resample: return "resample:" + p.file;
    case PopulationKind::uniform_ties: return "ties";
    case PopulationKind::default_for_experiment: return "default";
  }
  return "unknown";
}

double normal_rho_for_spearman(double rho_s) { return 2.0 * std::sin(std::numbers::pi * rho_s / 6.0); }

Population resolved_population(const SimulationConfig& config) {
  if (config.population.kind != PopulationKind::default_for_experiment) return config.population;
  Population p;
  switch (config.experiment) {
    case Experiment::table_correlations:
      p.kind = PopulationKind::discretized_normal;
      p.rho = 0.0;
      break;
    case Experiment::table3:
      p.kind = PopulationKind::discretized_normal;
      p.rho = normal_rho_for_spearman(reference::kOrdinalSpearman);
      break;
    case Experiment::table5:
      p.kind = PopulationKind::bivariate_normal;
      p.rho = normal_rho_for_spearman(reference::kOrdinalSpearman);
      break;
    case Experiment::table1:
    case Experiment::null_calibration: p.kind = PopulationKind::uniform_ties; break;
  }
  return p;
}

std::string canonical_config(const SimulationConfig& config) {
  std::ostringstream out;
  out << "experiment=" << experiment_name(config.experiment) << ";n=";
  for (std::size_t i = 0; i < config.n_values.size(); ++i) out << (i ? "," : "") << config.n_values[i];
  out << ";reps=" << config.replications << ";population=" << describe(resolved_population(config))
      << ";seed=" << config.seed << ";version=" << kVersion;
  return out.str();
}

std::uint64_t config_hash(const SimulationConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : canonical_config(config)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

SummaryRow summarize(std::string estimator, std::vector<double> values) {
  SummaryRow row;
  row.estimator = std::move(estimator);
  if (values.empty()) return row;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  row.mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const double v : values) {
    const double d = v - row.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  row.sd = values.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  row.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  row.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  row.median = k % 2 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
  row.min = values.front();
  row.max = values.back();
  row.range = row.max - row.min;
  return row;
}

const SizeBlock* SimulationReport::block(int n) const {
  for (const auto& b : blocks) {
    if (b.n == n) return &b;
  }
  return nullptr;
}

const SummaryRow* SimulationReport::row(int n, std::string_view estimator) const {
  const auto* b = block(n);
  if (!b) return nullptr;
  for (const auto& r : b->rows) {
    if (r.estimator == estimator) return &r;
  }
  return nullptr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 replication_rng(std::uint64_t seed, int n, int replication) {
  const std::uint64_t key = mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(n)) ^
                                  static_cast<std::uint64_t>(replication));
  return std::mt19937_64(key);
}

SimulationReport run_simulation(const SimulationConfig& config) {
  if (config.replications < 1) throw InvalidInputError("replications must be >= 1");
  if (config.n_values.empty()) throw InvalidInputError("no sample sizes given");
  for (const int n : config.n_values) {
    if (n < 3) throw InvalidInputError("sample sizes must be >= 3");
  }
  SimulationReport report;
  report.config = config;
  report.population = resolved_population(config);
  report.hash = config_hash(config);
  const Sampler sampler(report.population);
  const auto names = estimator_names(config.experiment);
  const int workers = std::max(1, config.workers);

  for (const int n : config.n_values) {
    const auto reps = static_cast<std::size_t>(config.replications);
    std::vector<std::vector<double>> results(reps);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
      try {
        for (std::size_t r = next++; r < reps && !failed; r = next++) {
          auto rng = replication_rng(config.seed, n, static_cast<int>(r));
          results[r] = replicate(config.experiment, sampler, n, rng);
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    SizeBlock block;
    block.n = n;
    for (std::size_t e = 0; e < names.size(); ++e) {
      std::vector<double> column(reps);
      for (std::size_t r = 0; r < reps; ++r) column[r] = results[r][e];
      if (config.experiment == Experiment::null_calibration && e == 0) {
        std::size_t beyond = 0;
        for (const double z : column) beyond += std::abs(z) > 1.85 ? 1 : 0;
        block.extras["p_abs_z_gt_1.850"] = static_cast<double>(beyond) / static_cast<double>(reps);
        block.extras["empirical_q025"] = quantile_type7(column, 0.025);
        block.extras["empirical_q975"] = quantile_type7(column, 0.975);
        const auto table = cached_null_pmf(n);
        const double sigma = std::sqrt(table->sigma2);
        block.extras["lattice_q025"] = static_cast<double>(table->quantile(0.025)) / sigma;
        block.extras["lattice_q975"] = static_cast<double>(table->quantile(0.975)) / sigma;
        block.extras["reference_q025"] = reference::kNullQuantileLow;
        block.extras["reference_q975"] = reference::kNullQuantileHigh;
      }
      block.rows.push_back(summarize(names[e], std::move(column)));
    }
    if (config.experiment == Experiment::table1) {
      block.extras["population_sigma"] = std::sqrt(to_double(population_variance(n)));
      if (const auto d = reference::distance_row(n)) block.extras["reference_excess_kurtosis"] = d->excess_kurtosis;
    }
    if (config.experiment == Experiment::table3) {
      const double kendall = block.rows[0].mean;
      const double kemeny = block.rows[1].mean;
      if (kemeny != 0.0) block.extras["mean_ratio_kendall_over_kemeny"] = kendall / kemeny;
    }
    if (config.experiment == Experiment::table_correlations) {
      block.extras["sd_ratio_arcsine_over_spearman"] = block.rows[5].sd / block.rows[2].sd;
      block.extras["two_over_pi"] = 2.0 / std::numbers::pi;
    }
    attach_references(config.experiment, block);
    report.blocks.push_back(std::move(block));
  }
  return report;
}

std::string render_text(const SimulationReport& report) {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.hash));
  out << "# kemeny-stat simulate\n"
      << "# version: " << kVersion << "\n"
      << "# experiment: " << experiment_name(report.config.experiment) << "\n"
      << "# population: " << describe(report.population) << "\n"
      << "# seed: " << report.config.seed << "\n"
      << "# replications: " << report.config.replications << "\n"
      << "# config hash: " << hash << "\n"
      << "# moments: sd uses divisor n-1; skew and excess kurtosis use population (biased) moments\n";
  for (const auto& block : report.blocks) {
    out << "\nn = " << block.n << "\n";
    char line[512];
    std::snprintf(line, sizeof line, "%-18s %14s %14s %14s %14s %14s %14s %10s %10s %14s %14s\n", "estimator", "mean",
                  "sd", "median", "min", "max", "range", "skew", "ex.kurt", "ref.mean", "ref.sd");
    out << line;
    for (const auto& r : block.rows) {
      const std::string rm = r.reference_mean ? format_double(*r.reference_mean, 5) : "-";
      const std::string rs = r.reference_sd ? format_double(*r.reference_sd, 5) : "-";
      std::snprintf(line, sizeof line, "%-18s %14.6f %14.6f %14.6f %14.6f %14.6f %14.6f %10.5f %10.5f %14s %14s\n",
                    r.estimator.c_str(), r.mean, r.sd, r.median, r.min, r.max, r.range, r.skew, r.excess_kurtosis,
                    rm.c_str(), rs.c_str());
      out << line;
    }
    for (const auto& [key, value] : block.extras) out << "  " << key << ": " << format_double(value, 6) << "\n";
  }
  return out.str();
}

std::string render_json(const SimulationReport& report) {
  nlohmann::ordered_json j;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.hash));
  j["version"] = kVersion;
  j["experiment"] = experiment_name(report.config.experiment);
  j["population"] = describe(report.population);
  j["seed"] = report.config.seed;
  j["replications"] = report.config.replications;
  j["config_hash"] = hash;
  j["moment_convention"] = "sd divisor n-1; skew and excess kurtosis from population moments";
  j["blocks"] = nlohmann::ordered_json::array();
  for (const auto& block : report.blocks) {
    nlohmann::ordered_json b;
    b["n"] = block.n;
    b["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : block.rows) {
      nlohmann::ordered_json row;
      row["estimator"] = r.estimator;
      row["mean"] = r.mean;
      row["sd"] = r.sd;
      row["median"] = r.median;
      row["min"] = r.min;
      row["max"] = r.max;
      row["range"] = r.range;
      row["skew"] = r.skew;
      row["excess_kurtosis"] = r.excess_kurtosis;
      row["reference_mean"] = r.reference_mean ? nlohmann::ordered_json(*r.reference_mean) : nlohmann::ordered_json();
      row["reference_sd"] = r.reference_sd ? nlohmann::ordered_json(*r.reference_sd) : nlohmann::ordered_json();
      b["rows"].push_back(std::move(row));
    }
    b["extras"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : block.extras) b["extras"][key] = value;
    j["blocks"].push_back(std::move(b));
  }
  return j.dump(2) + "\n";
}

}  // namespace kemeny
