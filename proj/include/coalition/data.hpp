#pragma once

// Dense row-major tabular data with named columns, plus the CSV schema used
// by the CLI: one header row, decimal-point floats, one designated target
// column, every other column a predictor in file order.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coalition/error.hpp"

namespace coalition {

class DataMatrix {
 public:
  // Row-major values, rows * column_names.size() entries, all finite.
  DataMatrix(std::vector<std::string> column_names, std::vector<double> values)
      : column_names_(std::move(column_names)), values_(std::move(values)) {
    if (column_names_.empty()) {
      raise(errc::validation, "data matrix needs at least one column");
    }
    if (values_.empty() || values_.size() % column_names_.size() != 0) {
      raise(errc::validation, "data matrix values do not form whole rows");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) raise(errc::validation, "data matrix entry is not finite");
    }
  }

  std::size_t row_count() const { return values_.size() / column_names_.size(); }
  std::size_t col_count() const { return column_names_.size(); }
  const std::vector<std::string>& column_names() const { return column_names_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * col_count(), col_count()};
  }

  double at(std::size_t r, std::size_t c) const { return values_[r * col_count() + c]; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(row_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, j);
    return out;
  }

  const std::vector<double>& storage() const { return values_; }

 private:
  std::vector<std::string> column_names_;
  std::vector<double> values_;  // row-major
};

struct TargetVector {
  std::string name;
  std::vector<double> values;
};

struct Dataset {
  DataMatrix features;
  TargetVector target;
};

inline void require_finite(const TargetVector& y) {
  for (double v : y.values) {
    if (!std::isfinite(v)) {
      raise(errc::validation, "target '" + y.name + "' has a non-finite entry");
    }
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell = (comma == std::string_view::npos)
                                      ? line.substr(start)
                                      : line.substr(start, comma - start);
    cells.emplace_back(trim(cell));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no,
                         const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    raise(errc::parse, "line " + std::to_string(line_no) + ", column '" + column +
                           "': '" + cell + "' is not a number");
  }
  return value;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Reads a header CSV, splitting off the named target column; the remaining
// columns become predictors in file order.
inline Dataset load_dataset_csv(std::istream& in, const std::string& target_name,
                                const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) {
    raise(errc::parse, origin + ": missing header row");
  }
  const std::vector<std::string> header = detail::split_csv_line(line);

  std::ptrdiff_t target_col = -1;
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_name) {
      if (target_col >= 0) {
        raise(errc::validation, origin + ": duplicate target column '" + target_name + "'");
      }
      target_col = static_cast<std::ptrdiff_t>(j);
    } else {
      feature_names.push_back(header[j]);
    }
  }
  if (target_col < 0) {
    raise(errc::validation, origin + ": target column '" + target_name + "' not found");
  }
  if (feature_names.empty()) {
    raise(errc::validation, origin + ": no predictor columns besides the target");
  }

  std::vector<double> values;
  std::vector<double> target;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      raise(errc::parse, origin + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = detail::parse_cell(cells[j], line_no, header[j]);
      if (static_cast<std::ptrdiff_t>(j) == target_col) {
        target.push_back(v);
      } else {
        values.push_back(v);
      }
    }
  }
  if (target.empty()) {
    raise(errc::insufficient_data, origin + ": no data rows");
  }

  Dataset out{DataMatrix(std::move(feature_names), std::move(values)),
              TargetVector{target_name, std::move(target)}};
  require_finite(out.target);
  return out;
}

inline Dataset load_dataset_csv_file(const std::string& path, const std::string& target_name) {
  std::ifstream in(path);
  if (!in) raise(errc::io, "cannot open '" + path + "' for reading");
  return load_dataset_csv(in, target_name, path);
}

// Predictors first, target last; full-precision floats so a round trip is exact.
inline void write_dataset_csv(std::ostream& out, const DataMatrix& X,
                              const TargetVector& y) {
  for (const auto& name : X.column_names()) out << name << ',';
  out << y.name << '\n';
  for (std::size_t i = 0; i < X.row_count(); ++i) {
    for (double v : X.row(i)) out << detail::format_double(v) << ',';
    out << detail::format_double(y.values[i]) << '\n';
  }
}

inline void write_dataset_csv_file(const std::string& path, const DataMatrix& X,
                                   const TargetVector& y) {
  std::ofstream out(path);
  if (!out) raise(errc::io, "cannot open '" + path + "' for writing");
  write_dataset_csv(out, X, y);
  if (!out.good()) raise(errc::io, "failed while writing '" + path + "'");
}

}  // namespace coalition
