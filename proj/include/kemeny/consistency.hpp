#pragma once

// Side-by-side comparison of closed-form expressions, published table values
// and exact oracles. Disagreements are recorded, never raised.

#include <optional>
#include <string>
#include <vector>

namespace kemeny {

struct ConsistencyRow {
  std::string section;
  std::string quantity;
  std::optional<int> n;
  std::optional<double> formula;
  std::optional<double> table;
  std::optional<double> oracle;
  std::string oracle_exact;  // rational form when available
  std::optional<double> relative_deviation;
  std::string status;        // "agree", "deviates" or "info"
  std::string note;
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  std::vector<std::string> substituted;
  std::vector<std::string> verbatim;
};

struct ConsistencyOptions {
  int oracle_n_max = 8;  // enumeration cost grows as n^n
  int workers = 1;
  double tolerance = 1e-3;
};

ConsistencyReport consistency_report(const ConsistencyOptions& options = {});

std::string render_text(const ConsistencyReport& report);
std::string render_json(const ConsistencyReport& report);

}  // namespace kemeny
