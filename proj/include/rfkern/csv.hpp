#pragma once

#include <string>
#include <vector>

#include "rfkern/types.hpp"

namespace rfkern {

// Minimal numeric CSV: one header row of column names, then rows of numbers.
// No quoting; parse failures carry the 1-based line number.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  Eigen::Index rows() const { return values.rows(); }
  // Index of a named column, or -1.
  long column(const std::string& name) const;
};

CsvTable read_numeric_csv(const std::string& path);
void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const Matrix& values);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace rfkern
