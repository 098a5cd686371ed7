#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mpls/errors.hpp"
#include "mpls/types.hpp"

namespace mpls {

// Shared CSV matrix format: one matrix row per line, comma-separated decimal
// literals, no header row, no trailing comma. Scientific notation is accepted
// on read; values are written with up to 17 significant digits so doubles
// round-trip exactly. Vectors are n-by-1 files.

namespace detail {

inline std::string csv_pos(const std::filesystem::path& path, std::size_t row,
                           std::size_t col) {
  return path.string() + ":" + std::to_string(row) + ":" + std::to_string(col);
}

inline double parse_field(const std::string& field,
                          const std::filesystem::path& path, std::size_t row,
                          std::size_t col) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
    --end;
  // from_chars rejects an explicit leading plus sign.
  if (begin != end && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end)
    throw CsvError(csv_pos(path, row, col) + ": not a decimal literal: '" +
                   field + "'");
  if (!std::isfinite(value))
    throw CsvError(csv_pos(path, row, col) + ": non-finite value");
  return value;
}

inline std::string format_17g(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

} // namespace detail

inline Matrixd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path.string() + ": cannot open for reading");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    std::vector<double> row;
    std::size_t start = 0, col = 0;
    for (;;) {
      ++col;
      std::size_t comma = line.find(',', start);
      std::string field = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(detail::parse_field(field, path, lineno, col));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw CsvError(detail::csv_pos(path, lineno, row.size()) + ": expected " +
                     std::to_string(rows.front().size()) + " columns, got " +
                     std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(path.string() + ": empty matrix file");

  Matrixd m(static_cast<Index>(rows.size()),
            static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline Vectord read_vector_csv(const std::filesystem::path& path) {
  Matrixd m = read_matrix_csv(path);
  if (m.cols() != 1)
    throw CsvError(path.string() +
                   ":1:2: expected a single-column vector file, got " +
                   std::to_string(m.cols()) + " columns");
  return m.col(0);
}

inline void write_matrix_csv(const std::filesystem::path& path,
                             const Matrixd& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CsvError(path.string() + ": cannot open for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_17g(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw CsvError(path.string() + ": write failed");
}

inline void write_vector_csv(const std::filesystem::path& path,
                             const Vectord& v) {
  write_matrix_csv(path, v);
}

} // namespace mpls
