#pragma once

#include <string>
#include <vector>

namespace dwk::csv {

// Column-major numeric table. Files are UTF-8, LF line endings, one header
// row, '.' decimal separator, floats at 17 significant digits so values
// round-trip exactly.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  void add_row(const std::vector<double>& row);
  const std::vector<double>& column(const std::string& name) const;
};

std::string format_double(double v);

void write_table(const Table& table, const std::string& path);
Table read_table(const std::string& path);

}  // namespace dwk::csv
