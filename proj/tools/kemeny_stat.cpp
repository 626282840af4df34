// kemeny-stat: command-line front end for the kemeny library.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kemeny/consistency.hpp"
#include "kemeny/csv.hpp"
#include "kemeny/enum_oracle.hpp"
#include "kemeny/errors.hpp"
#include "kemeny/multivar.hpp"
#include "kemeny/null_models.hpp"
#include "kemeny/rank_core.hpp"
#include "kemeny/simulation.hpp"

using nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = kemeny::kDefaultSeed;
  int reps = kemeny::kDefaultReps;
  int workers = 1;
  bool json = false;
  std::string out;
};

struct Columns {
  std::string data;
  std::string x;
  std::string y;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw kemeny::ParseError("cannot write '" + g.out + "'");
  file << text;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::pair<kemeny::ScoreVector, kemeny::ScoreVector> load_pair(const Columns& c, const kemeny::DataMatrix& data) {
  if (data.cols() < 2) throw kemeny::ShapeError("need at least two columns");
  const std::size_t ix = c.x.empty() ? 0 : data.column_index(c.x);
  const std::size_t iy = c.y.empty() ? 1 : data.column_index(c.y);
  return {data.score_vector(ix), data.score_vector(iy)};
}

int run_correlate(const Globals& g, const Columns& c, const std::string& method) {
  const auto data = kemeny::load_csv(c.data);
  const auto [x, y] = load_pair(c, data);
  std::vector<std::pair<std::string, double>> rows;
  auto want = [&](const char* name) { return method == "all" || method == name; };
  if (want("pearson")) rows.emplace_back("pearson", kemeny::pearson_r(x.values(), y.values()));
  if (want("spearman")) rows.emplace_back("spearman", kemeny::midrank_spearman(x, y));
  if (want("kemeny-rho")) rows.emplace_back("kemeny-rho", kemeny::spearman_rho(x, y));
  if (want("kemeny")) rows.emplace_back("kemeny", kemeny::kemeny_tau(x, y));
  if (want("kendall-b")) rows.emplace_back("kendall-b", kemeny::kendall_tau_b(x, y));
  if (want("arcsine")) rows.emplace_back("arcsine", kemeny::arcsine_r(x, y));
  if (rows.empty()) throw CLI::ValidationError("--method", "unknown method '" + method + "'");

  if (g.json) {
    ordered_json j;
    j["n"] = x.size();
    for (const auto& [name, v] : rows) j["estimates"][name] = v;
    emit(g, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "n = " << x.size() << "\n";
    for (const auto& [name, v] : rows) out << name << " " << num(v) << "\n";
    emit(g, out.str());
  }
  return 0;
}

int run_test(const Globals& g, const Columns& c, const std::string& method, bool per_sample, bool as_printed) {
  const auto data = kemeny::load_csv(c.data);
  const auto [x, y] = load_pair(c, data);
  kemeny::TestResult exact;
  kemeny::TestResult normal;
  if (method == "kemeny") {
    const auto scale = per_sample ? kemeny::KemenyScale::per_sample : kemeny::KemenyScale::population;
    exact = kemeny::z_kemeny(x, y, {kemeny::NullKind::lattice, scale});
    normal = kemeny::z_kemeny(x, y, {kemeny::NullKind::normal, scale});
  } else if (method == "spearman") {
    exact = kemeny::z_spearman(x, y, {kemeny::NullKind::lattice, as_printed});
    normal = kemeny::z_spearman(x, y, {kemeny::NullKind::normal, as_printed});
  } else if (method == "kendall-b") {
    exact = kemeny::z_kendall_b(x, y);
    normal = exact;
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + method + "'");
  }
  const auto counts = kemeny::pair_stats(x, y);
  const bool lattice = exact.null == kemeny::NullKind::lattice;

  if (g.json) {
    ordered_json j;
    j["method"] = exact.method;
    j["n"] = x.size();
    j["estimate"] = exact.estimate;
    j["z"] = exact.statistic;
    j["null"] = lattice ? "lattice" : "normal";
    j["p_one_sided"] = exact.p_one_sided;
    j["p_two_sided"] = exact.p_two_sided;
    j["p_one_sided_normal"] = normal.p_one_sided;
    j["p_two_sided_normal"] = normal.p_two_sided;
    j["ties"] = {{"tied_x", counts.tied_x}, {"tied_y", counts.tied_y}, {"tied_xy", counts.tied_xy},
                 {"concordant", counts.concordant}, {"discordant", counts.discordant}};
    emit(g, j.dump(2) + "\n");
  } else {
    std::ostringstream out;
    out << "method " << exact.method << "\n"
        << "n " << x.size() << "\n"
        << "estimate " << num(exact.estimate) << "\n"
        << "z " << num(exact.statistic) << "\n"
        << "null " << (lattice ? "lattice" : "normal") << "\n"
        << "p_two_sided " << num(exact.p_two_sided) << "\n"
        << "p_one_sided " << num(exact.p_one_sided) << "\n"
        << "p_two_sided_normal " << num(normal.p_two_sided) << "\n"
        << "pairs C=" << counts.concordant << " D=" << counts.discordant << " Tx=" << counts.tied_x
        << " Ty=" << counts.tied_y << " Txy=" << counts.tied_xy << "\n";
    emit(g, out.str());
  }
  return 0;
}

int run_matrix(const Globals& g, const std::string& path, const std::string& method, bool csv) {
  const auto data = kemeny::load_csv(path);
  const auto xi = kemeny::correlation_matrix(data, kemeny::parse_method(method), g.workers);
  const double lambda = kemeny::min_eigenvalue(xi.matrix);
  const auto p = static_cast<Eigen::Index>(data.cols());
  if (csv) {
    std::ostringstream out;
    out << "variable";
    for (const auto& name : data.names()) out << "," << name;
    out << "\n";
    for (Eigen::Index i = 0; i < p; ++i) {
      out << data.names()[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < p; ++j) out << "," << num(xi.matrix(i, j));
      out << "\n";
    }
    out << "# min_eigenvalue," << num(lambda) << "\n";
    emit(g, out.str());
    return 0;
  }
  ordered_json j;
  j["method"] = kemeny::method_name(xi.method);
  j["variables"] = data.names();
  j["matrix"] = ordered_json::array();
  for (Eigen::Index i = 0; i < p; ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < p; ++k) row.push_back(xi.matrix(i, k));
    j["matrix"].push_back(row);
  }
  j["spreads"] = std::vector<double>(xi.spreads.data(), xi.spreads.data() + xi.spreads.size());
  j["min_eigenvalue"] = lambda;
  j["positive_definite"] = lambda > kemeny::kPdTolerance;
  emit(g, j.dump(2) + "\n");
  return 0;
}

int run_enumerate(const Globals& g, int n, bool permutations_only) {
  const auto d = permutations_only ? kemeny::exact_permutation_distribution(n)
                                   : kemeny::exact_distance_distribution(n, g.workers);
  if (g.json) {
    ordered_json j;
    j["n"] = n;
    j["population"] = permutations_only ? "permutations" : "value vectors";
    j["total"] = d.total();
    j["support"] = d.support;
    j["counts"] = d.counts;
    j["mean"] = kemeny::to_string(d.mean);
    j["variance"] = kemeny::to_string(d.variance);
    j["std_kurtosis"] = kemeny::to_string(d.std_kurtosis);
    emit(g, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream out;
  out << "# n=" << n << " total=" << d.total() << " mean=" << kemeny::to_string(d.mean)
      << " variance=" << kemeny::to_string(d.variance) << " std_kurtosis=" << kemeny::to_string(d.std_kurtosis)
      << "\n";
  out << "centred_distance,count\n";
  for (std::size_t i = 0; i < d.support.size(); ++i) out << d.support[i] << "," << d.counts[i] << "\n";
  emit(g, out.str());
  return 0;
}

std::vector<int> parse_sizes(const std::string& list) {
  std::vector<int> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      sizes.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--n", "bad sample size '" + item + "'");
    }
  }
  return sizes;
}

std::vector<int> default_sizes(kemeny::Experiment e) {
  switch (e) {
    case kemeny::Experiment::table_correlations: return {30, 150};
    case kemeny::Experiment::table1: return {9, 10, 15, 20, 25, 30};
    case kemeny::Experiment::table3: return {15, 25, 100, 250};
    case kemeny::Experiment::table5: return {15, 25, 100, 250};
    case kemeny::Experiment::null_calibration: return {15};
  }
  return {};
}

int full_scale_reps(kemeny::Experiment e) {
  switch (e) {
    case kemeny::Experiment::table_correlations: return 15000;
    case kemeny::Experiment::table3:
    case kemeny::Experiment::table5: return 5000;
    case kemeny::Experiment::null_calibration: return 20000;
    case kemeny::Experiment::table1: return 100000;
  }
  return kemeny::kDefaultReps;
}

int run_simulate(const Globals& g, const std::string& experiment, const std::string& sizes,
                 const std::string& population, bool full_scale, bool reps_given) {
  kemeny::SimulationConfig config;
  config.experiment = kemeny::parse_experiment(experiment);
  config.n_values = sizes.empty() ? default_sizes(config.experiment) : parse_sizes(sizes);
  config.replications = full_scale && !reps_given ? full_scale_reps(config.experiment) : g.reps;
  if (!population.empty()) config.population = kemeny::parse_population(population);
  config.seed = g.seed;
  config.workers = g.workers;
  const auto report = kemeny::run_simulation(config);
  emit(g, g.json ? kemeny::render_json(report) : kemeny::render_text(report));
  return 0;
}

int run_nulls(const Globals& g, int n, const std::string& kind) {
  if (kind == "kemeny") {
    const auto table = kemeny::null_pmf(n);
    if (g.json) {
      emit(g, kemeny::null_table_json(table) + "\n");
      return 0;
    }
    std::ostringstream out;
    out << "n " << table.n << "\nm " << table.m << "\nalpha " << num(table.alpha) << "\nq " << num(table.q)
        << "\nsigma2 " << num(table.sigma2) << "\nvariance " << num(table.variance()) << "\nstd_kurtosis "
        << num(table.standardized_kurtosis()) << "\nq025 " << table.quantile(0.025) << "\nq975 "
        << table.quantile(0.975) << "\n";
    emit(g, out.str());
    return 0;
  }
  if (kind == "spearman") {
    const auto s = kemeny::spearman_null(n);
    if (g.json) {
      ordered_json j;
      j["n"] = s.n;
      j["K"] = s.K;
      j["shape"] = s.shape;
      j["target_kurtosis"] = s.target_kurtosis;
      j["support"] = s.z;
      j["probabilities"] = s.pmf;
      emit(g, j.dump() + "\n");
      return 0;
    }
    std::ostringstream out;
    out << "n " << s.n << "\nK " << s.K << "\nshape " << num(s.shape) << "\ntarget_kurtosis "
        << num(s.target_kurtosis) << "\nstd_kurtosis " << num(s.standardized_kurtosis()) << "\n";
    emit(g, out.str());
    return 0;
  }
  throw CLI::ValidationError("--kind", "expected kemeny or spearman");
}

int run_consistency(const Globals& g, int oracle_n_max) {
  kemeny::ConsistencyOptions options;
  options.oracle_n_max = oracle_n_max;
  options.workers = g.workers;
  const auto report = kemeny::consistency_report(options);
  emit(g, g.json ? kemeny::render_json(report) : kemeny::render_text(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kemeny-metric rank correlation, null distributions and simulation harness", "kemeny-stat"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  auto* reps_opt = app.add_option("--reps", g.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--json", g.json, "JSON output");
  app.add_option("--out", g.out, "Write output to PATH");

  Columns cols;
  std::string method = "all";
  auto* correlate = app.add_subcommand("correlate", "Bivariate estimates for two CSV columns");
  correlate->add_option("--data", cols.data, "CSV file")->required();
  correlate->add_option("-x,--x", cols.x, "First column (default: first)");
  correlate->add_option("-y,--y", cols.y, "Second column (default: second)");
  correlate->add_option("--method", method, "all|pearson|spearman|kemeny-rho|kemeny|kendall-b|arcsine");

  std::string test_method = "kemeny";
  bool per_sample = false;
  bool as_printed = false;
  auto* test = app.add_subcommand("test", "z test with lattice and normal p-values");
  test->add_option("--data", cols.data, "CSV file")->required();
  test->add_option("-x,--x", cols.x, "First column (default: first)");
  test->add_option("-y,--y", cols.y, "Second column (default: second)");
  test->add_option("--method", test_method, "kemeny|spearman|kendall-b")->capture_default_str();
  test->add_flag("--per-sample", per_sample, "Kemeny: scale by the observed spreads");
  test->add_flag("--as-printed", as_printed, "Spearman: use rho / sqrt(n - 1)");

  std::string matrix_data;
  std::string matrix_method = "kemeny";
  bool matrix_csv = false;
  auto* matrix = app.add_subcommand("matrix", "Pairwise correlation matrix with eigenvalue diagnostic");
  matrix->add_option("--data", matrix_data, "CSV file")->required();
  matrix->add_option("--method", matrix_method, "kemeny|spearman|arcsine|kendall-b")->capture_default_str();
  matrix->add_flag("--csv", matrix_csv, "CSV output");

  int enum_n = 4;
  bool permutations_only = false;
  auto* enumerate = app.add_subcommand("enumerate", "Exact centred-distance distribution for small n");
  enumerate->add_option("--n", enum_n, "Sample size in [2, 8]")->capture_default_str();
  enumerate->add_flag("--permutations", permutations_only, "Restrict to tie-free vectors");

  std::string experiment = "table_correlations";
  std::string sizes;
  std::string population;
  bool full_scale = false;
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo experiment");
  simulate->add_option("--experiment", experiment, "table_correlations|table1|table3|table5|null_calibration")
      ->capture_default_str();
  simulate->add_option("--n", sizes, "Comma-separated sample sizes");
  simulate->add_option("--population", population, "normal:RHO | discrete:RHO[:LEVELS] | resample:PATH | ties");
  simulate->add_flag("--full-scale", full_scale, "Use the published replication counts");

  int nulls_n = 15;
  std::string nulls_kind = "kemeny";
  auto* nulls = app.add_subcommand("nulls", "Tabulated null distribution");
  nulls->add_option("--n", nulls_n, "Sample size")->capture_default_str();
  nulls->add_option("--kind", nulls_kind, "kemeny|spearman")->capture_default_str();

  int oracle_n_max = 8;
  auto* consistency = app.add_subcommand("consistency-report", "Formula vs table vs oracle comparison");
  consistency->add_option("--oracle-n-max", oracle_n_max, "Largest enumerated n")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*correlate) return run_correlate(g, cols, method);
    if (*test) return run_test(g, cols, test_method, per_sample, as_printed);
    if (*matrix) return run_matrix(g, matrix_data, matrix_method, matrix_csv);
    if (*enumerate) return run_enumerate(g, enum_n, permutations_only);
    if (*simulate) return run_simulate(g, experiment, sizes, population, full_scale, reps_opt->count() > 0);
    if (*nulls) return run_nulls(g, nulls_n, nulls_kind);
    if (*consistency) return run_consistency(g, oracle_n_max);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "kemeny-stat: " << e.what() << "\n";
    return 1;
  } catch (const kemeny::Error& e) {
    std::cerr << "kemeny-stat: " << e.what() << "\n";
    return e.kind() == kemeny::ErrorKind::numeric ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "kemeny-stat: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
