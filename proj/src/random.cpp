#include "qrht/random.hpp"

#include <random>

namespace qrht {

struct UniformRng::Impl {
  std::mt19937_64 gen;
};

UniformRng::UniformRng(std::uint64_t seed) : impl_(new Impl{std::mt19937_64(seed)}) {}
UniformRng::~UniformRng() { delete impl_; }

double UniformRng::next() {
  const std::uint64_t bits = impl_->gen();
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * u - 1.0;
}

Matrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
  UniformRng rng(seed);
  Matrix a(m, n);
  for (std::size_t k = 0; k < m * n; ++k) a.data()[k] = rng.next();
  return a;
}

Matrix random_symmetric(std::size_t m, std::uint64_t seed) {
  Matrix a = random_matrix(m, m, seed);
  Matrix s(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

}  // namespace qrht
