#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace singlab {

/// Column-oriented text table serialized as CSV. Leading "# key = value" lines
/// carry the configuration echo; numbers are written with %.17g so a table read
/// back reproduces the doubles bit for bit.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }

  void add_row(std::vector<std::string> cells);

  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::vector<double> numbers(const std::string& column) const;
  std::vector<std::string> strings(const std::string& column) const;
  /// Rows whose `column` equals `value`, as a new table with the same columns.
  Table where(const std::string& column, const std::string& value) const;
  /// Distinct values of a column in first-appearance order.
  std::vector<std::string> distinct(const std::string& column) const;

  std::vector<std::pair<std::string, std::string>> header;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);
std::string format_bool(bool v);
double parse_number(const std::string& text);

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

}  // namespace singlab
