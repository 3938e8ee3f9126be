#include "qrht/modified.hpp"

#include <cmath>

namespace qrht {

void fused_update(Matrix& a, const HouseholderReflector& refl, std::size_t pivot_col,
                  double* tau_out) {
  const std::size_t len = refl.length();
  const std::size_t row0 = pivot_col;
  if (row0 + len != a.rows())
    throw DimensionError("fused_update: reflector length inconsistent with pivot column");

  if (tau_out) *tau_out = refl.degenerate ? 0.0 : -refl.beta_scalar / refl.norm;

  if (!refl.degenerate) {
    for (std::size_t j = pivot_col + 1; j < a.cols(); ++j) {
      double d = 0.0;
      for (std::size_t i = 0; i < len; ++i) d += refl.v[i] * a(row0 + i, j);
      for (std::size_t i = 0; i < len; ++i)
        a(row0 + i, j) = fused_macro_op(a(row0 + i, j), refl.v[i], d);
    }
  }

  a(row0, pivot_col) = refl.degenerate ? 0.0 : refl.alpha;
  for (std::size_t i = 1; i < len; ++i)
    a(row0 + i, pivot_col) = refl.degenerate ? 0.0 : refl.v[i];
}

QrFactorization geqr2ht(Matrix a) {
  if (a.rows() < a.cols()) throw DimensionError("wide matrix unsupported (need m >= n)");
  QrFactorization f;
  f.m = a.rows();
  f.n = a.cols();
  f.taus.assign(f.n, 0.0);
  for (std::size_t i = 0; i < f.n; ++i) {
    auto x = VectorView::col_slice(a, i, i, f.m - i);
    HouseholderReflector refl = make_reflector(x);
    fused_update(a, refl, i);
    f.taus[i] = refl.degenerate ? 0.0 : refl.v[0];
  }
  f.packed = std::move(a);
  return f;
}

QrFactorization geqrfht(Matrix a, std::size_t block_size) {
  if (a.rows() < a.cols()) throw DimensionError("wide matrix unsupported (need m >= n)");
  if (block_size < 1 || block_size > a.cols())
    throw DimensionError("block_size must be in [1, n]");
  QrFactorization f;
  f.m = a.rows();
  f.n = a.cols();
  f.taus.assign(f.n, 0.0);
  for (std::size_t k = 0; k < f.n; k += block_size) {
    const std::size_t b = std::min(block_size, f.n - k);
    std::vector<std::vector<double>> v_cols;
    v_cols.reserve(b);
    for (std::size_t j = 0; j < b; ++j) {
      const std::size_t col = k + j;
      auto x = VectorView::col_slice(a, col, col, f.m - col);
      HouseholderReflector refl = make_reflector(x);
      // Fused pass over the remaining panel columns only.
      if (!refl.degenerate) {
        for (std::size_t jj = col + 1; jj < k + b; ++jj) {
          double d = 0.0;
          for (std::size_t i = 0; i < refl.length(); ++i) d += refl.v[i] * a(col + i, jj);
          for (std::size_t i = 0; i < refl.length(); ++i)
            a(col + i, jj) = fused_macro_op(a(col + i, jj), refl.v[i], d);
        }
      }
      a(col, col) = refl.degenerate ? 0.0 : refl.alpha;
      for (std::size_t i = 1; i < refl.length(); ++i)
        a(col + i, col) = refl.degenerate ? 0.0 : refl.v[i];
      f.taus[col] = refl.degenerate ? 0.0 : refl.v[0];

      std::vector<double> vfull(f.m - k, 0.0);
      if (!refl.degenerate)
        for (std::size_t i = 0; i < refl.length(); ++i) vfull[j + i] = refl.v[i];
      v_cols.push_back(std::move(vfull));
    }
    detail::apply_panel_joint(a, v_cols, k, k + b);
  }
  f.packed = std::move(a);
  return f;
}

}  // namespace qrht
