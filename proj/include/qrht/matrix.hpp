#pragma once

#include <cstddef>
#include <vector>

#include "qrht/errors.hpp"

namespace qrht {

/// Dense real matrix, column-major: element (i,j) lives at data[j*rows + i].
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* col(std::size_t j) { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const { return data_.data() + j * rows_; }

  double frobenius_norm() const;
  double max_abs() const;

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Strided view over a column slice or an owned buffer. Does not own the
/// backing memory unless constructed from a vector.
class VectorView {
 public:
  VectorView(const double* base, std::size_t length, std::size_t stride = 1)
      : base_(const_cast<double*>(base)), length_(length), stride_(stride) {
    if (length == 0) throw DimensionError("empty vector view");
  }
  VectorView(double* base, std::size_t length, std::size_t stride = 1)
      : base_(base), length_(length), stride_(stride) {
    if (length == 0) throw DimensionError("empty vector view");
  }
  explicit VectorView(std::vector<double>& v) : VectorView(v.data(), v.size()) {}

  /// Column slice A(i0:i0+len, j).
  static VectorView col_slice(Matrix& a, std::size_t j, std::size_t i0, std::size_t len) {
    return VectorView(a.col(j) + i0, len);
  }
  static VectorView col_slice(const Matrix& a, std::size_t j, std::size_t i0, std::size_t len) {
    return VectorView(a.col(j) + i0, len);
  }

  std::size_t size() const { return length_; }
  double& operator[](std::size_t i) { return base_[i * stride_]; }
  double operator[](std::size_t i) const { return base_[i * stride_]; }

 private:
  double* base_;
  std::size_t length_;
  std::size_t stride_;
};

}  // namespace qrht
