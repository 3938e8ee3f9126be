#pragma once

#include <vector>

#include "qrht/matrix.hpp"

namespace qrht {

/// Sum_i x[i]*y[i], accumulated left-to-right in index order.
double dot(const VectorView& x, const VectorView& y);

/// Euclidean norm with overflow-safe scaling (max-abs rescale before squaring).
double nrm2(const VectorView& x);

/// A*x (or A^T*x when transpose). Each output element accumulated in index order.
std::vector<double> gemv(const Matrix& a, const VectorView& x, bool transpose = false);

/// C' = A*B (+ C when accumulate). Inner k-loop runs in index order.
Matrix gemm(const Matrix& a, const Matrix& b);
Matrix gemm(const Matrix& a, const Matrix& b, const Matrix& c);

/// Back substitution for R*x = b, last row first. Throws SingularError on a
/// zero diagonal entry.
std::vector<double> solve_upper_triangular(const Matrix& r, const VectorView& b);

}  // namespace qrht
