/**
 * Copyright (c) vidsum contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "vidsum/matrix.hpp"

#include <cmath>
#include <string>

#include "vidsum/errors.hpp"

namespace vidsum {

MatrixView::MatrixView(std::span<const double> data, std::size_t cols) : data_(data), cols_(cols) {
  if (cols == 0 && !data.empty()) {
    throw ShapeError("matrix view with zero columns must be empty");
  }
  if (cols != 0 && data.size() % cols != 0) {
    throw ShapeError("matrix view size " + std::to_string(data.size()) +
                     " is not a multiple of " + std::to_string(cols));
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ShapeError("ragged rows: row " + std::to_string(r) + " has " +
                       std::to_string(rows[r].size()) + " values, expected " +
                       std::to_string(cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

MatrixView Matrix::row_range(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw ShapeError("row range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") outside matrix with " + std::to_string(rows_) + " rows");
  }
  MatrixView v;
  v.data_ = std::span<const double>(data_).subspan(begin * cols_, (end - begin) * cols_);
  v.cols_ = cols_;
  v.rows_ = end - begin;
  return v;
}

MatrixView Matrix::view() const { return row_range(0, rows_); }

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Vector matvec(const Matrix& w, std::span<const double> x) {
  if (x.size() != w.cols()) {
    throw ShapeError("matvec: input length " + std::to_string(x.size()) + " vs " +
                     std::to_string(w.cols()) + " weight columns");
  }
  Vector y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) y[r] = dot(w.row(r), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("dot: lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("distance: lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace vidsum
