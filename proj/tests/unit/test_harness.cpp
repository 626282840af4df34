#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kemeny/consistency.hpp"
#include "kemeny/csv.hpp"
#include "kemeny/errors.hpp"
#include "kemeny/simulation.hpp"

using namespace kemeny;

namespace {

DataMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "t.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, ParsesHeaderAndInfinities) {
  const auto d = parse("a,b\n1,2\n-inf,3.5\n+Inf,1e3\n");
  EXPECT_EQ(d.names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.column(0)[1], -std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.column(0)[2], std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.column(1)[2], 1000.0);
}

TEST(Csv, RejectsBadInput) {
  EXPECT_THROW(parse("a,b\n1,nan\n2,3\n"), InvalidInputError);
  EXPECT_NE(error_of("a,b\n1,2\n2,NaN\n").find("row 2"), std::string::npos);
  EXPECT_THROW(parse("a,b\n1,2,3\n"), ParseError);
  EXPECT_THROW(parse("a,b\n1,x\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("a,b\n"), ParseError);
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), Error);
}

TEST(Summary, BiasedMomentConvention) {
  const auto r = summarize("x", {4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_DOUBLE_EQ(r.sd, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(r.median, 2.5);
  EXPECT_DOUBLE_EQ(r.min, 1.0);
  EXPECT_DOUBLE_EQ(r.max, 4.0);
  EXPECT_DOUBLE_EQ(r.range, 3.0);
  EXPECT_NEAR(r.skew, 0.0, 1e-15);
  EXPECT_NEAR(r.excess_kurtosis, -1.36, 1e-12);
  EXPECT_DOUBLE_EQ(summarize("y", {5, 1, 3}).median, 3.0);
}

TEST(Config, PopulationsAndHash) {
  const auto p = parse_population("discrete:-0.25:7");
  EXPECT_EQ(p.kind, PopulationKind::discretized_normal);
  EXPECT_DOUBLE_EQ(p.rho, -0.25);
  EXPECT_EQ(p.levels, 7);
  EXPECT_EQ(parse_population("normal:0.5").kind, PopulationKind::bivariate_normal);
  EXPECT_EQ(parse_population("ties").kind, PopulationKind::uniform_ties);
  EXPECT_EQ(parse_population("resample:data.csv").file, "data.csv");
  EXPECT_THROW(parse_population("normal:2"), std::exception);
  EXPECT_THROW(parse_population("gamma:1"), std::exception);

  SimulationConfig a;
  a.experiment = Experiment::table3;
  a.n_values = {15};
  SimulationConfig b = a;
  b.workers = 8;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = a.seed + 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(canonical_config(a).find("workers"), std::string::npos);
  EXPECT_EQ(parse_experiment(experiment_name(Experiment::null_calibration)), Experiment::null_calibration);
}

TEST(Rng, StreamsAreKeyed) {
  EXPECT_NE(mix64(1), mix64(2));
  auto r1 = replication_rng(5, 10, 3);
  auto r2 = replication_rng(5, 10, 3);
  auto r3 = replication_rng(5, 10, 4);
  const auto v1 = r1();
  EXPECT_EQ(v1, r2());
  EXPECT_NE(v1, r3());
  EXPECT_NEAR(normal_rho_for_spearman(0.5), 2.0 * std::sin(std::numbers::pi / 12.0), 1e-15);
}

TEST(Simulation, ReportsDoNotDependOnWorkers) {
  for (const auto e : {Experiment::table_correlations, Experiment::table1, Experiment::table3, Experiment::table5,
                       Experiment::null_calibration}) {
    SimulationConfig c;
    c.experiment = e;
    c.n_values = {12, 20};
    c.replications = 150;
    c.workers = 1;
    const auto one = run_simulation(c);
    c.workers = 4;
    const auto four = run_simulation(c);
    EXPECT_EQ(render_text(one), render_text(four)) << experiment_name(e);
    EXPECT_EQ(render_json(one), render_json(four)) << experiment_name(e);
  }
}

TEST(Simulation, HeaderAndRows) {
  SimulationConfig c;
  c.experiment = Experiment::table_correlations;
  c.n_values = {30};
  c.replications = 200;
  const auto report = run_simulation(c);
  const auto text = render_text(report);
  EXPECT_NE(text.find("seed"), std::string::npos);
  EXPECT_NE(text.find("config hash"), std::string::npos);
  EXPECT_NE(text.find(std::string(kVersion)), std::string::npos);
  const auto* s = report.row(30, "spearman");
  const auto* k = report.row(30, "kemeny_rho_s");
  ASSERT_NE(s, nullptr);
  ASSERT_NE(k, nullptr);
  // Midrank Pearson and the rank-vector form agree to rounding.
  EXPECT_NEAR(s->mean, k->mean, 1e-12);
  EXPECT_NEAR(s->sd, k->sd, 1e-12);
  EXPECT_NEAR(s->median, k->median, 1e-12);
  EXPECT_NEAR(s->excess_kurtosis, k->excess_kurtosis, 1e-12);
  EXPECT_EQ(report.row(31, "spearman"), nullptr);
}

TEST(Consistency, ReportCoversRequiredComparisons) {
  ConsistencyOptions o;
  o.oracle_n_max = 6;
  const auto r = consistency_report(o);
  ASSERT_FALSE(r.rows.empty());
  ASSERT_FALSE(r.substituted.empty());
  bool poly_vs_table = false, table_kurtosis = false, variance_agrees = true;
  for (const auto& row : r.rows) {
    if (row.quantity == "cubic fit vs tabulated kurtosis") poly_vs_table = true;
    if (row.quantity == "distance table excess kurtosis vs enumeration") table_kurtosis = true;
    if (row.quantity.rfind("population variance", 0) == 0 && row.status == "deviates") variance_agrees = false;
  }
  EXPECT_TRUE(poly_vs_table);
  EXPECT_TRUE(table_kurtosis);
  EXPECT_TRUE(variance_agrees);
  EXPECT_NE(render_text(r).find("[spearman kurtosis]"), std::string::npos);
  EXPECT_NE(render_json(r).find("\"substituted\""), std::string::npos);
}
