#include "csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace dwk::csv {

void Table::add_row(const std::vector<double>& row) {
  if (columns.empty()) columns.resize(header.size());
  if (row.size() != columns.size())
    throw numeric_error("csv: row width does not match header");
  for (std::size_t i = 0; i < row.size(); ++i) columns[i].push_back(row[i]);
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw numeric_error("csv: no column named " + name);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_table(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numeric_error("csv: cannot write " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  std::size_t n = table.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      out << format_double(table.columns[c][r]);
    }
    out << '\n';
  }
  if (!out) throw numeric_error("csv: write failed for " + path);
}

Table read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw numeric_error("csv: cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw numeric_error("csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t c = 0;
    while (std::getline(ls, cell, ',')) {
      if (c >= t.columns.size()) throw numeric_error("csv: ragged row in " + path);
      t.columns[c++].push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (c != t.columns.size()) throw numeric_error("csv: ragged row in " + path);
  }
  return t;
}

}  // namespace dwk::csv
