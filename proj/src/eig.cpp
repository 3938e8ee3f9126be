#include "qrht/eig.hpp"

#include <algorithm>
#include <cmath>

#include "qrht/blas.hpp"
#include "qrht/modified.hpp"

namespace qrht {

namespace {

double max_offdiag(const Matrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (i != j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace

EigResult qr_algorithm_eigenvalues(Matrix a, std::size_t max_iters, double tol,
                                   double symmetry_tol) {
  if (a.rows() != a.cols()) throw DimensionError("eigenvalue iteration needs a square matrix");

  EigResult res;
  double asym = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < j; ++i) asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
  res.symmetric_input = asym <= symmetry_tol * std::max(1.0, a.max_abs());

  res.max_offdiag = max_offdiag(a);
  while (res.iterations < max_iters && res.max_offdiag >= tol) {
    QrFactorization f = geqr2ht(a);
    a = gemm(f.r(), f.form_q());
    ++res.iterations;
    res.max_offdiag = max_offdiag(a);
  }
  res.converged = res.max_offdiag < tol;

  res.values.resize(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) res.values[i] = a(i, i);
  std::sort(res.values.begin(), res.values.end(), std::greater<double>());
  return res;
}

}  // namespace qrht
