#include "singlab/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace singlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  for (const auto& c : columns_)
    if (c.find(',') != std::string::npos) throw std::invalid_argument("column names may not contain commas");
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("row width does not match the table");
  for (const auto& c : cells)
    if (c.find(',') != std::string::npos || c.find('\n') != std::string::npos)
      throw std::invalid_argument("cells may not contain commas or newlines");
  rows_.push_back(std::move(cells));
}

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::invalid_argument("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

bool Table::has_column(const std::string& name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::vector<double> Table::numbers(const std::string& column) const {
  const auto j = column_index(column);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(parse_number(r[j]));
  return out;
}

std::vector<std::string> Table::strings(const std::string& column) const {
  const auto j = column_index(column);
  std::vector<std::string> out;
  for (const auto& r : rows_) out.push_back(r[j]);
  return out;
}

Table Table::where(const std::string& column, const std::string& value) const {
  const auto j = column_index(column);
  Table t(columns_);
  t.header = header;
  for (const auto& r : rows_)
    if (r[j] == value) t.rows_.push_back(r);
  return t;
}

std::vector<std::string> Table::distinct(const std::string& column) const {
  const auto j = column_index(column);
  std::vector<std::string> out;
  for (const auto& r : rows_)
    if (std::find(out.begin(), out.end(), r[j]) == out.end()) out.push_back(r[j]);
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

double parse_number(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "true") return 1.0;
  if (text == "false") return 0.0;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [k, v] : table.header) out << "# " << k << " = " << v << '\n';
  const auto& cols = table.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j];
  out << '\n';
  for (const auto& r : table.rows()) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::vector<std::pair<std::string, std::string>> header;
  Table t;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      continue;
    }
    if (trim(line).empty()) continue;
    if (!have_columns) {
      t = Table(split(line));
      have_columns = true;
    } else {
      t.add_row(split(line));
    }
  }
  if (!have_columns) throw std::runtime_error(path.string() + " has no column header");
  t.header = std::move(header);
  return t;
}

}  // namespace singlab
