// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major matrix of doubles and the handful of operations the
// recurrent cells need. A batch of n-vectors is a (batch x n) Matrix.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Builds a matrix from nested braces, e.g. Matrix::from_rows({{1, 2}, {3, 4}}).
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  void fill(double value) noexcept;
  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws ShapeError naming both shapes unless `a` and `b` have equal shape.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

// Products. `_nt` multiplies by the transpose of the right operand and `_tn`
// by the transpose of the left one, which covers every product in BPTT
// without materializing transposes.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// out += a * b
void matmul_acc(const Matrix& a, const Matrix& b, Matrix& out);
/// out += a * b^T
void matmul_nt_acc(const Matrix& a, const Matrix& b, Matrix& out);
/// out += a^T * b
void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out);
Matrix transpose(const Matrix& a);

// Entrywise operations.
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix sigmoid(const Matrix& a);
Matrix tanh(const Matrix& a);
double sigmoid(double x) noexcept;

/// Adds a (1 x cols) row vector to every row of `a`.
void add_row_inplace(Matrix& a, const Matrix& row);
/// Column sums as a (1 x cols) matrix.
Matrix col_sum(const Matrix& a);
/// out += col_sum(a)
void col_sum_acc(const Matrix& a, Matrix& out);

double sum_squares(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;
bool all_finite(const Matrix& a) noexcept;

}  // namespace atn
