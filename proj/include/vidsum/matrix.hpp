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
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vidsum {

using Vector = std::vector<double>;

/// Non-owning row-major view over a block of rows.
class MatrixView {
 public:
  MatrixView() = default;
  MatrixView(std::span<const double> data, std::size_t cols);

  std::size_t rows() const { return cols_ == 0 ? rows_ : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows() == 0; }
  std::span<const double> row(std::size_t r) const { return data_.subspan(r * cols_, cols_); }
  std::span<const double> data() const { return data_; }

 private:
  std::span<const double> data_;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  friend class Matrix;
};

/// Dense row-major matrix of doubles. Used both for frame/description
/// feature streams (one row per frame) and for layer weights.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws ShapeError unless data.size() == rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Rows [begin, end). Throws ShapeError when out of range.
  MatrixView row_range(std::size_t begin, std::size_t end) const;
  MatrixView view() const;
  operator MatrixView() const { return view(); }  // NOLINT(google-explicit-constructor)

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using FeatureMatrix = Matrix;

/// y = W x. Throws ShapeError when x.size() != W.cols().
Vector matvec(const Matrix& w, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);

/// Sum of squared componentwise differences.
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace vidsum
