#include "qrht/matrix.hpp"

#include <cmath>

namespace qrht {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be >= 1");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius_norm() const {
  // Overflow-safe: rescale by the largest magnitude before squaring.
  double scale = max_abs();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : data_) {
    double s = v / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace qrht
