#include "qrht/householder.hpp"

#include <cmath>

namespace qrht {

Matrix QrFactorization::r() const {
  Matrix out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) out(i, j) = packed(i, j);
  return out;
}

std::vector<double> QrFactorization::reflector_v(std::size_t j) const {
  std::vector<double> v(m - j, 0.0);
  v[0] = taus[j];
  for (std::size_t i = 1; i < m - j; ++i) v[i] = packed(j + i, j);
  return v;
}

Matrix QrFactorization::form_q() const {
  Matrix q = Matrix::identity(m);
  // Q = P1 P2 ... Pn applied to I, so apply Pn first.
  for (std::size_t jj = n; jj-- > 0;) {
    if (taus[jj] == 0.0) continue;  // degenerate column
    std::vector<double> v = reflector_v(jj);
    const std::size_t len = v.size();
    for (std::size_t c = 0; c < m; ++c) {
      double w = 0.0;
      for (std::size_t i = 0; i < len; ++i) w += v[i] * q(jj + i, c);
      for (std::size_t i = 0; i < len; ++i) q(jj + i, c) -= 2.0 * v[i] * w;
    }
  }
  return q;
}

HouseholderReflector make_reflector(const VectorView& x) {
  const std::size_t len = x.size();
  HouseholderReflector refl;
  refl.v.assign(len, 0.0);

  double norm = nrm2(x);
  if (norm == 0.0) {
    refl.degenerate = true;
    refl.v[0] = 1.0;  // identity-reflector convention for the zero column
    return refl;
  }
  const double x1 = x[0];
  const double sign = (x1 < 0.0) ? -1.0 : 1.0;  // sign(0) := +1
  refl.alpha = -sign * norm;
  refl.norm = refl.alpha;
  refl.beta_scalar = x1 - refl.alpha;
  refl.r = std::sqrt(0.5 * (refl.alpha * refl.alpha - x1 * refl.alpha));
  const double two_r = 2.0 * refl.r;
  refl.v[0] = refl.beta_scalar / two_r;
  for (std::size_t i = 1; i < len; ++i) refl.v[i] = x[i] / two_r;
  return refl;
}

void apply_reflector_classic(const HouseholderReflector& refl, Matrix& a, std::size_t row0,
                             std::size_t col0) {
  const std::size_t len = refl.length();
  if (row0 + len > a.rows()) throw DimensionError("apply_reflector_classic: row block mismatch");
  if (refl.degenerate) return;
  for (std::size_t j = col0; j < a.cols(); ++j) {
    double w = 0.0;
    for (std::size_t i = 0; i < len; ++i) w += refl.v[i] * a(row0 + i, j);
    for (std::size_t i = 0; i < len; ++i) a(row0 + i, j) -= 2.0 * refl.v[i] * w;
  }
}

namespace {

void store_reflector(QrFactorization& f, Matrix& a, const HouseholderReflector& refl,
                     std::size_t i) {
  a(i, i) = refl.degenerate ? 0.0 : refl.alpha;
  for (std::size_t k = 1; k < refl.length(); ++k) a(i + k, i) = refl.degenerate ? 0.0 : refl.v[k];
  f.taus[i] = refl.degenerate ? 0.0 : refl.v[0];
}

void check_shape(const Matrix& a, std::size_t block_size, bool blocked) {
  if (a.rows() < a.cols()) throw DimensionError("wide matrix unsupported (need m >= n)");
  if (blocked && (block_size < 1 || block_size > a.cols()))
    throw DimensionError("block_size must be in [1, n]");
}

}  // namespace

namespace detail {

// Exact joint application of the panel's reflectors to the trailing block:
// W0 = V^T A (gemm-shaped), a small inter-reflector coupling recurrence turns
// W0 into Y with P_k...P_{k+b-1} A = A + V Y, then A += V Y (gemm-shaped).
void apply_panel_joint(Matrix& a, const std::vector<std::vector<double>>& v_cols, std::size_t row0,
                       std::size_t col0) {
  const std::size_t b = v_cols.size();
  if (b == 0 || col0 >= a.cols()) return;
  const std::size_t len = a.rows() - row0;
  const std::size_t t = a.cols() - col0;

  // W0 = V^T A_trail
  std::vector<std::vector<double>> w(b, std::vector<double>(t, 0.0));
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t c = 0; c < t; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += v_cols[j][i] * a(row0 + i, col0 + c);
      w[j][c] = s;
    }

  // S = V^T V (strictly lower part is all that is needed)
  std::vector<std::vector<double>> s(b, std::vector<double>(b, 0.0));
  for (std::size_t j = 1; j < b; ++j)
    for (std::size_t p = 0; p < j; ++p) {
      double acc = 0.0;
      for (std::size_t i = 0; i < len; ++i) acc += v_cols[j][i] * v_cols[p][i];
      s[j][p] = acc;
    }

  // Y_j = -2 (W0_j + sum_{p<j} S_jp Y_p): reflector j sees the block already
  // updated by reflectors < j.
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t c = 0; c < t; ++c) {
      double acc = w[j][c];
      for (std::size_t p = 0; p < j; ++p) acc += s[j][p] * w[p][c];
      w[j][c] = -2.0 * acc;
    }

  // A_trail += V Y
  for (std::size_t c = 0; c < t; ++c)
    for (std::size_t j = 0; j < b; ++j) {
      const double y = w[j][c];
      if (y == 0.0) continue;
      for (std::size_t i = 0; i < len; ++i) a(row0 + i, col0 + c) += v_cols[j][i] * y;
    }
}

}  // namespace detail

QrFactorization geqr2(Matrix a) {
  check_shape(a, 0, false);
  QrFactorization f;
  f.m = a.rows();
  f.n = a.cols();
  f.taus.assign(f.n, 0.0);
  for (std::size_t i = 0; i < f.n; ++i) {
    auto x = VectorView::col_slice(a, i, i, f.m - i);
    HouseholderReflector refl = make_reflector(x);
    apply_reflector_classic(refl, a, i, i + 1);
    store_reflector(f, a, refl, i);
  }
  f.packed = std::move(a);
  return f;
}

QrFactorization geqrf(Matrix a, std::size_t block_size) {
  check_shape(a, block_size, true);
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
      // Update only the remaining panel columns here; trailing block later.
      if (col + 1 < k + b) {
        // restrict to panel: temporarily apply column range [col+1, k+b)
        for (std::size_t jj = col + 1; jj < k + b; ++jj) {
          if (refl.degenerate) break;
          double w = 0.0;
          for (std::size_t i = 0; i < refl.length(); ++i) w += refl.v[i] * a(col + i, jj);
          for (std::size_t i = 0; i < refl.length(); ++i) a(col + i, jj) -= 2.0 * refl.v[i] * w;
        }
      }
      store_reflector(f, a, refl, col);
      // Embed v into a full panel-height column (zeros above its pivot row).
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
