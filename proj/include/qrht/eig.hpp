#pragma once

#include <vector>

#include "qrht/matrix.hpp"

namespace qrht {

struct EigResult {
  std::vector<double> values;  // diagonal estimates, sorted descending
  std::size_t iterations = 0;
  double max_offdiag = 0.0;
  bool converged = false;
  bool symmetric_input = true;  // within the symmetry check tolerance
};

/// Plain (unshifted) QR iteration A <- R*Q using the fused factorization,
/// until max off-diagonal magnitude < tol or the iteration cap.
EigResult qr_algorithm_eigenvalues(Matrix a, std::size_t max_iters, double tol,
                                   double symmetry_tol = 1e-12);

}  // namespace qrht
