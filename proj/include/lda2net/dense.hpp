// Copyright 2026 The lda2net Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lda2net/error.hpp"
#include "lda2net/io.hpp"

namespace lda2net {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  bool operator==(const DenseMatrix&) const = default;

  // Header "index,0,1,...", then one line per row led by its index.
  std::string to_csv() const {
    std::string out = "index";
    for (std::size_t c = 0; c < cols_; ++c) out += "," + std::to_string(c);
    out += '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
      out += std::to_string(r);
      for (std::size_t c = 0; c < cols_; ++c) out += "," + io::format_double((*this)(r, c));
      out += '\n';
    }
    return out;
  }

  // Matrix Market array format (column-major values).
  std::string to_matrix_market() const {
    std::string out = "%%MatrixMarket matrix array real general\n";
    out += std::to_string(rows_) + ' ' + std::to_string(cols_) + '\n';
    for (std::size_t c = 0; c < cols_; ++c)
      for (std::size_t r = 0; r < rows_; ++r) out += io::format_double((*this)(r, c)) + '\n';
    return out;
  }

  static DenseMatrix from_matrix_market(std::string_view text, const std::string& source = "matrix") {
    auto lines = io::split(text, '\n');
    if (lines.empty() || lines[0].rfind("%%MatrixMarket", 0) != 0) {
      throw DataError(source + ": missing %%MatrixMarket banner");
    }
    const bool array = lines[0].find("array") != std::string::npos;
    std::size_t i = 1;
    while (i < lines.size() && (io::trim(lines[i]).empty() || lines[i][0] == '%')) ++i;
    if (i >= lines.size()) throw DataError(source + ": missing size line");
    auto size = io::split(io::trim(lines[i]), ' ');
    ++i;
    if (size.size() < 2) throw DataError(source + ": bad size line");
    DenseMatrix m(io::parse_int<std::size_t>(size[0], source), io::parse_int<std::size_t>(size[1], source));
    std::size_t k = 0;
    for (; i < lines.size(); ++i) {
      auto line = io::trim(lines[i]);
      if (line.empty() || line[0] == '%') continue;
      const std::string where = source + ":" + std::to_string(i + 1);
      if (array) {
        if (k >= m.rows_ * m.cols_) throw DataError(where + ": too many values");
        m(k % m.rows_, k / m.rows_) = io::parse_double(line, where);
        ++k;
      } else {
        auto f = io::split(line, ' ');
        if (f.size() != 3) throw DataError(where + ": expected 'row col value'");
        auto r = io::parse_int<std::size_t>(f[0], where), c = io::parse_int<std::size_t>(f[1], where);
        if (r < 1 || r > m.rows_ || c < 1 || c > m.cols_) throw DataError(where + ": index out of range");
        m(r - 1, c - 1) = io::parse_double(f[2], where);
      }
    }
    if (array && k != m.rows_ * m.cols_) throw DataError(source + ": expected " + std::to_string(m.rows_ * m.cols_) + " values");
    return m;
  }

  // Parses a dense CSV. A header row is recognised when any of its cells is
  // not numeric; a leading label column is dropped when `expected_cols` says
  // there is one extra column. Returns the header labels (if any) alongside.
  struct CsvParse;
  static CsvParse from_csv(std::string_view text, std::size_t expected_cols, const std::string& source = "csv");

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct DenseMatrix::CsvParse {
  DenseMatrix matrix;
  std::vector<std::string> header;  // column labels, empty when absent
};

inline DenseMatrix::CsvParse DenseMatrix::from_csv(std::string_view text, std::size_t expected_cols,
                                                   const std::string& source) {
  auto rows = io::parse_csv(text, source);
  if (rows.empty()) throw DataError(source + ": empty matrix file");
  auto numeric = [](const std::string& s) {
    try {
      io::parse_double(s);
      return true;
    } catch (const DataError&) {
      return false;
    }
  };
  CsvParse out;
  std::size_t first = 0;
  bool has_header = false;
  for (const auto& f : rows[0].fields)
    if (!numeric(f)) has_header = true;
  const std::size_t width = rows[has_header ? std::min<std::size_t>(1, rows.size() - 1) : 0].fields.size();
  const bool label_col = width == expected_cols + 1;
  if (!label_col && width != expected_cols) {
    throw DataError(source + ": expected " + std::to_string(expected_cols) + " columns, found " +
                    std::to_string(width));
  }
  if (has_header) {
    out.header = rows[0].fields;
    if (out.header.size() == expected_cols + 1) out.header.erase(out.header.begin());
    first = 1;
  }
  out.matrix = DenseMatrix(rows.size() - first, expected_cols);
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = source + ":" + std::to_string(rows[r].line);
    if (f.size() != width) throw DataError(where + ": inconsistent column count");
    for (std::size_t c = 0; c < expected_cols; ++c) {
      out.matrix(r - first, c) = io::parse_double(f[c + (label_col ? 1 : 0)], where);
    }
  }
  return out;
}

}  // namespace lda2net
