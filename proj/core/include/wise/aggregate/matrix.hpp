#pragma once

#include <vector>

#include "wise/errors.hpp"

namespace wise::aggregate {

// Dense row-major matrix, sized for confusion matrices (K, J <= a few dozen).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix shape");
  }

  static Matrix identity(int n) {
    Matrix m(n, n, 0.0);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static Matrix uniform_rows(int rows, int cols) {
    return Matrix(rows, cols, cols > 0 ? 1.0 / cols : 0.0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return data_[index(r, c)]; }
  double at(int r, int c) const { return data_[index(r, c)]; }

  double row_sum(int r) const {
    double s = 0.0;
    for (int c = 0; c < cols_; ++c) s += at(r, c);
    return s;
  }

  bool row_stochastic(double tol = 1e-9) const {
    for (int r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (int c = 0; c < cols_; ++c) {
        if (at(r, c) < 0.0) return false;
        s += at(r, c);
      }
      if (s < 1.0 - tol || s > 1.0 + tol) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
      throw InvalidIndex("matrix index out of range");
    }
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Largest |a - b| over matched rows of two equally shaped matrices, reported
// per row as the L1 distance; used for recovery checks.
inline double max_row_l1(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("max_row_l1 shape mismatch");
  }
  double worst = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    double d = 0.0;
    for (int c = 0; c < a.cols(); ++c) {
      const double diff = a.at(r, c) - b.at(r, c);
      d += diff < 0 ? -diff : diff;
    }
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace wise::aggregate
