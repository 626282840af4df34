#include "kemeny/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "kemeny/errors.hpp"

namespace kemeny {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column);
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line, std::size_t column) {
  const std::string low = lower(cell);
  if (low == "inf" || low == "+inf" || low == "infinity" || low == "+infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (low == "-inf" || low == "-infinity") return -std::numeric_limits<double>::infinity();
  if (low == "nan" || low == "+nan" || low == "-nan") {
    throw InvalidInputError(where(source, line, column) + ": NaN in data row " + std::to_string(line - 1));
  }
  if (cell.empty()) throw ParseError(where(source, line, column) + ": empty field");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(where(source, line, column) + ": not a number: '" + cell + "'");
  }
  return value;
}

}  // namespace

DataMatrix parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    names = split(line);
    break;
  }
  if (names.empty()) throw ParseError(source + ": empty file");

  std::vector<std::vector<double>> columns(names.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != names.size()) {
      throw ParseError(where(source, line_no, std::min(cells.size(), names.size()) + 1) + ": expected " +
                       std::to_string(names.size()) + " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      columns[j].push_back(parse_cell(cells[j], source, line_no, j + 1));
    }
  }
  if (columns.front().empty()) throw ParseError(source + ": no data rows");
  return DataMatrix(std::move(names), std::move(columns));
}

DataMatrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

}  // namespace kemeny
