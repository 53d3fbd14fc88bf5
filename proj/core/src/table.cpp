#include "hjlab/table.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "hjlab/errors.hpp"

namespace hjlab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns_.size())
    throw InvalidArgument("table row has " + std::to_string(row.size()) + " values for " +
                          std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(row));
}

std::size_t Table::index(const std::string& column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end()) throw InvalidArgument("no table column named '" + column + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t k = index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[k]);
  return out;
}

Table Table::filter(const std::string& column, double value) const {
  const std::size_t k = index(column);
  Table out(columns_);
  for (const auto& r : rows_)
    if (r[k] == value) out.rows_.push_back(r);
  return out;
}

std::vector<double> Table::distinct(const std::string& column) const {
  const std::size_t k = index(column);
  std::set<double> s;
  for (const auto& r : rows_) s.insert(r[k]);
  return {s.begin(), s.end()};
}

void Table::sort_by(const std::vector<std::string>& columns) {
  std::vector<std::size_t> keys;
  for (const auto& c : columns) keys.push_back(index(c));
  std::stable_sort(rows_.begin(), rows_.end(), [&](const auto& a, const auto& b) {
    for (std::size_t k : keys) {
      if (a[k] < b[k]) return true;
      if (b[k] < a[k]) return false;
    }
    return false;
  });
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t k = 0; k < columns_.size(); ++k) out += (k ? "," : "") + columns_[k];
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out += ',';
      out += format_double(r[k]);
    }
    out += '\n';
  }
  return out;
}

Table Table::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty CSV");
  std::vector<std::string> cols;
  {
    std::istringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  Table t(cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) throw InvalidArgument("non-numeric CSV cell '" + cell + "'");
    }
    t.add_row(std::move(row));
  }
  return t;
}

void Table::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << to_csv();
  if (!f) throw Error("failed writing '" + path + "'");
}

Table Table::read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_csv(ss.str());
}

}  // namespace hjlab
