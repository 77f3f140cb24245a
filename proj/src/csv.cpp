#include "rfkern/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfkern {

long CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<long>(j);
  return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

}  // namespace

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);

  CsvTable table;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  ++line_no;
  for (const auto& cell : split_line(line)) table.header.push_back(trim(cell));
  if (table.header.empty()) throw SchemaError(path + ": no columns");

  std::vector<double> data;
  long rows = 0;
  const long cols = static_cast<long>(table.header.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (static_cast<long>(cells.size()) != cols)
      throw ParseError(path + ": expected " + std::to_string(cols) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    for (const auto& raw : cells) {
      const std::string cell = trim(raw);
      try {
        std::size_t used = 0;
        data.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(path + ": bad number '" + cell + "'", line_no);
      }
    }
    ++rows;
  }
  table.values.resize(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) table.values(i, j) = data[static_cast<std::size_t>(i * cols + j)];
  return table;
}

void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const Matrix& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw ShapeMismatchError("write_numeric_csv: header width mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << "\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << "\n";
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

}  // namespace rfkern
