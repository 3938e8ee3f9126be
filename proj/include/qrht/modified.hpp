#pragma once

#include "qrht/householder.hpp"

namespace qrht {

/// Scalar bundle of the fused update path (accumulator b, dot partial s, and
/// the beta/norm/tau scalars the normalization works with).
struct FusedUpdateScalars {
  double b = 0.0;
  double s = 0.0;
  double beta_scalar = 0.0;
  double norm = 0.0;
  double tau = 0.0;
};

/// a - 2*v_i*partial_dot as one fused expression with fixed order:
/// t = v_i*partial_dot; a - (t + t). The simulator's macro path computes the
/// same expression bitwise.
inline double fused_macro_op(double a, double v_i, double partial_dot) {
  const double t = v_i * partial_dot;
  return a - (t + t);
}

/// Fused trailing update: every column j >= pivot_col receives
/// a_col -= 2 v (v^T a_col), one dot then one fused pass per column; the pivot
/// column is overwritten with (alpha, essential v).
void fused_update(Matrix& a, const HouseholderReflector& refl, std::size_t pivot_col,
                  double* tau_out = nullptr);

/// Unblocked QR through the fused update path.
QrFactorization geqr2ht(Matrix a);

/// Blocked variant: panels factored with the fused path, trailing matrix
/// updated with the same aggregated two-gemm scheme as geqrf.
QrFactorization geqrfht(Matrix a, std::size_t block_size);

}  // namespace qrht
