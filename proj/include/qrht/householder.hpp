#pragma once

#include <vector>

#include "qrht/blas.hpp"
#include "qrht/matrix.hpp"

namespace qrht {

/// Reflector P = I - 2vv^T built from a column x, with the scalar bundle
/// (alpha, r, beta_scalar, norm) carried for the fused update path.
struct HouseholderReflector {
  std::vector<double> v;   // unit vector
  double alpha = 0.0;      // -sign(x1) * ||x||  (sign(0) := +1)
  double r = 0.0;          // sqrt((alpha^2 - x1*alpha)/2)
  double beta_scalar = 0.0;  // x1 - alpha
  double norm = 0.0;       // signed norm carrier, equals alpha
  bool degenerate = false;  // zero column: identity reflector

  std::size_t length() const { return v.size(); }
};

/// Packed QR: R in and above the diagonal, essential v parts below; taus hold
/// the per-column 2*v1^2-equivalent scalars needed to rebuild unit reflectors.
struct QrFactorization {
  Matrix packed;
  std::vector<double> taus;  // v1 of each unit reflector (0 for degenerate)
  std::size_t m = 0, n = 0;

  Matrix r() const;       // n x n upper triangle, exact zeros below diagonal
  Matrix form_q() const;  // explicit m x m Q = P1 P2 ... Pn
  std::vector<double> reflector_v(std::size_t j) const;  // unit v, length m-j
};

HouseholderReflector make_reflector(const VectorView& x);

/// Two-stage classical update of A(row0:, col0:cols): w = v^T A_block, then
/// A_block -= 2 v w^T, in that order.
void apply_reflector_classic(const HouseholderReflector& refl, Matrix& a, std::size_t row0,
                             std::size_t col0);

/// Unblocked QR (column-at-a-time reflectors, gemv-style trailing updates).
QrFactorization geqr2(Matrix a);

/// Blocked QR: panels factored unblocked, trailing matrix updated with the
/// aggregated two-gemm scheme W = V^T A, A -= 2 V W.
QrFactorization geqrf(Matrix a, std::size_t block_size);

namespace detail {
/// Joint (gemm-shaped) application of a panel's reflectors to the trailing
/// block, shared by the blocked classic and fused factorizations.
void apply_panel_joint(Matrix& a, const std::vector<std::vector<double>>& v_cols,
                       std::size_t row0, std::size_t col0);
}  // namespace detail

}  // namespace qrht
