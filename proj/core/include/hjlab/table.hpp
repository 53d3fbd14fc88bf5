#pragma once

#include <string>
#include <vector>

namespace hjlab {

/// Numeric table with named columns; CSV doubles are printed with %.17g so a
/// round trip through text is exact.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<double> row);
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t index(const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
  double at(std::size_t row, const std::string& column) const { return rows_.at(row).at(index(column)); }

  /// Rows whose column equals value exactly.
  Table filter(const std::string& column, double value) const;
  /// Distinct values of a column in ascending order.
  std::vector<double> distinct(const std::string& column) const;
  /// Stable sort by the given columns, lexicographically.
  void sort_by(const std::vector<std::string>& columns);

  std::string to_csv() const;
  static Table from_csv(const std::string& text);
  void write_csv(const std::string& path) const;
  static Table read_csv(const std::string& path);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// "%.17g" formatting of one double.
std::string format_double(double v);

}  // namespace hjlab
