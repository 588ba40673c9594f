// SPDX-License-Identifier: Apache-2.0

#include "atn/numkit/matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace atn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                     " does not match " + shape_string());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape_string() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

namespace {

void require_inner(std::size_t lhs, std::size_t rhs, const Matrix& a, const Matrix& b,
                   const char* what) {
  if (lhs != rhs) {
    throw ShapeError(std::string(what) + ": inner dimensions differ " + a.shape_string() +
                     " vs " + b.shape_string());
  }
}

}  // namespace

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
  return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<RowMajor> view(Matrix& m) {
  return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

void require_out(const Matrix& out, std::size_t rows, std::size_t cols, const char* what,
                 const Matrix& a, const Matrix& b) {
  if (out.rows() != rows || out.cols() != cols) {
    throw ShapeError(std::string(what) + ": output " + out.shape_string() + " for " +
                     a.shape_string() + " and " + b.shape_string());
  }
}

}  // namespace

void matmul_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require_inner(a.cols(), b.rows(), a, b, "matmul");
  require_out(out, a.rows(), b.cols(), "matmul", a, b);
  if (out.size() == 0 || a.cols() == 0) return;
  view(out).noalias() += view(a) * view(b);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_inner(a.cols(), b.rows(), a, b, "matmul");
  Matrix out(a.rows(), b.cols());
  matmul_acc(a, b, out);
  return out;
}

void matmul_nt_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require_inner(a.cols(), b.cols(), a, b, "matmul_nt");
  require_out(out, a.rows(), b.rows(), "matmul_nt", a, b);
  if (out.size() == 0 || a.cols() == 0) return;
  view(out).noalias() += view(a) * view(b).transpose();
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require_inner(a.cols(), b.cols(), a, b, "matmul_nt");
  Matrix out(a.rows(), b.rows());
  matmul_nt_acc(a, b, out);
  return out;
}

void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  require_inner(a.rows(), b.rows(), a, b, "matmul_tn");
  require_out(out, a.cols(), b.cols(), "matmul_tn", a, b);
  if (out.size() == 0 || a.rows() == 0) return;
  view(out).noalias() += view(a).transpose() * view(b);
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require_inner(a.rows(), b.rows(), a, b, "matmul_tn");
  Matrix out(a.cols(), b.cols());
  matmul_tn_acc(a, b, out);
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

namespace {

template <typename F>
Matrix zip(const Matrix& a, const Matrix& b, const char* what, F f) {
  require_same_shape(a, b, what);
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

template <typename F>
Matrix map(const Matrix& a, F f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix sub(const Matrix& a, const Matrix& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  return zip(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double s) {
  return map(a, [s](double x) { return x * s; });
}

double sigmoid(double x) noexcept {
  // Both branches avoid exp overflow for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& a) {
  return map(a, [](double x) { return sigmoid(x); });
}

Matrix tanh(const Matrix& a) {
  return map(a, [](double x) { return std::tanh(x); });
}

void add_row_inplace(Matrix& a, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("add_row: row " + row.shape_string() + " does not broadcast over " +
                     a.shape_string());
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) r[j] += row[j];
  }
}

void col_sum_acc(const Matrix& a, Matrix& out) {
  if (out.rows() != 1 || out.cols() != a.cols()) {
    throw ShapeError("col_sum: output " + out.shape_string() + " for " + a.shape_string());
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j];
  }
}

Matrix col_sum(const Matrix& a) {
  Matrix out(1, a.cols());
  col_sum_acc(a, out);
  return out;
}

double sum_squares(const Matrix& a) noexcept {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return s;
}

double max_abs(const Matrix& a) noexcept {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Matrix& a) noexcept {
  return std::all_of(a.values().begin(), a.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace atn
