#include "qrht/blas.hpp"

#include <cmath>

namespace qrht {

double dot(const VectorView& x, const VectorView& y) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2(const VectorView& x) {
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) scale = std::max(scale, std::fabs(x[i]));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = x[i] / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

std::vector<double> gemv(const Matrix& a, const VectorView& x, bool transpose) {
  const std::size_t m = a.rows(), n = a.cols();
  if (!transpose) {
    if (x.size() != n) throw DimensionError("gemv: x length must equal cols(A)");
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += a(i, j) * x[j];
    return y;
  }
  if (x.size() != m) throw DimensionError("gemv: x length must equal rows(A) for A^T");
  std::vector<double> y(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) y[j] += a(i, j) * x[i];
  return y;
}

static Matrix gemm_impl(const Matrix& a, const Matrix& b, const Matrix* c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) throw DimensionError("gemm: inner dimensions do not conform");
  if (c && (c->rows() != m || c->cols() != n))
    throw DimensionError("gemm: accumulator shape does not conform");
  Matrix out = c ? *c : Matrix(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      double s = out(i, j);
      for (std::size_t p = 0; p < k; ++p) s += a(i, p) * b(p, j);
      out(i, j) = s;
    }
  return out;
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  Matrix zero(a.rows(), b.cols());
  return gemm_impl(a, b, &zero);
}

Matrix gemm(const Matrix& a, const Matrix& b, const Matrix& c) { return gemm_impl(a, b, &c); }

std::vector<double> solve_upper_triangular(const Matrix& r, const VectorView& b) {
  const std::size_t n = r.rows();
  if (r.cols() != n) throw DimensionError("solve_upper_triangular: R must be square");
  if (b.size() != n) throw DimensionError("solve_upper_triangular: b length must equal n");
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    if (r(ii, ii) == 0.0) throw SingularError(ii);
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r(ii, j) * x[j];
    x[ii] = s / r(ii, ii);
  }
  return x;
}

}  // namespace qrht
