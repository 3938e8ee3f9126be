#pragma once

#include <cstdint>

#include "qrht/matrix.hpp"

namespace qrht {

/// Deterministic uniform [-1, 1] stream on top of mt19937_64 with an explicit
/// bits-to-double mapping, so other implementations can reproduce it by
/// porting the generator. Identifier: "mt19937_64/u53-affine".
inline constexpr const char* kRngAlgorithm = "mt19937_64/u53-affine";

class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed);
  ~UniformRng();
  UniformRng(const UniformRng&) = delete;
  UniformRng& operator=(const UniformRng&) = delete;

  /// Uniform in [-1, 1]: (x >> 11) * 2^-53 mapped affinely.
  double next();

 private:
  struct Impl;
  Impl* impl_;
};

/// m x n matrix with entries drawn column by column from UniformRng(seed).
Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

/// Symmetric m x m matrix: random, then (A + A^T)/2.
Matrix random_symmetric(std::size_t m, std::uint64_t seed);

}  // namespace qrht
