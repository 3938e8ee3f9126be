#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrht/blas.hpp"
#include "qrht/householder.hpp"
#include "qrht/random.hpp"

using namespace qrht;

namespace {
constexpr double kEps = 0x1p-52;

double residual_rel(const Matrix& a, const QrFactorization& f) {
  Matrix q = f.form_q();
  Matrix r = f.r();
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double qr = 0.0;
      for (std::size_t k = 0; k < r.rows(); ++k) qr += q(i, k) * r(k, j);
      s += (qr - a(i, j)) * (qr - a(i, j));
    }
  return std::sqrt(s) / a.frobenius_norm();
}

double orth_err(const QrFactorization& f) {
  Matrix q = f.form_q();
  double s = 0.0;
  for (std::size_t i = 0; i < q.cols(); ++i)
    for (std::size_t j = 0; j < q.cols(); ++j) {
      double d = (i == j) ? -1.0 : 0.0;
      for (std::size_t k = 0; k < q.rows(); ++k) d += q(k, i) * q(k, j);
      s += d * d;
    }
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("make_reflector worked examples") {
  std::vector<double> x1 = {-1, 0, 0};
  HouseholderReflector r1 = make_reflector(VectorView(x1));
  CHECK(r1.alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r1.r == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r1.v[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(r1.v[1]) <= 4 * kEps);
  CHECK(std::abs(r1.v[2]) <= 4 * kEps);

  std::vector<double> x2 = {3, 4};
  HouseholderReflector r2 = make_reflector(VectorView(x2));
  CHECK(r2.alpha == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(r2.r == doctest::Approx(std::sqrt(20.0)).epsilon(1e-15));
  CHECK(r2.v[0] == doctest::Approx(8.0 / (2.0 * std::sqrt(20.0))).epsilon(1e-15));
  CHECK(r2.v[1] == doctest::Approx(4.0 / (2.0 * std::sqrt(20.0))).epsilon(1e-15));
  const double vn = std::sqrt(r2.v[0] * r2.v[0] + r2.v[1] * r2.v[1]);
  CHECK(std::abs(vn - 1.0) <= 16 * 2 * kEps);

  std::vector<double> x3 = {0, 0, 0};
  HouseholderReflector r3 = make_reflector(VectorView(x3));
  CHECK(r3.degenerate);
  CHECK(r3.alpha == 0.0);
}

TEST_CASE("reflector invariants over random columns") {
  UniformRng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t len = 2 + rep % 9;
    std::vector<double> x(len);
    for (auto& e : x) e = rng.next();
    HouseholderReflector rf = make_reflector(VectorView(x));
    double vn = 0, xn = 0;
    for (std::size_t i = 0; i < len; ++i) {
      vn += rf.v[i] * rf.v[i];
      xn += x[i] * x[i];
    }
    CHECK(std::abs(vn - 1.0) <= 16.0 * len * kEps);
    CHECK(std::abs(rf.alpha * rf.alpha - xn) <= 16.0 * len * kEps * xn);
    // P x = (alpha, 0, ..., 0)
    double vdotx = 0;
    for (std::size_t i = 0; i < len; ++i) vdotx += rf.v[i] * x[i];
    for (std::size_t i = 1; i < len; ++i) {
      const double px = x[i] - 2.0 * rf.v[i] * vdotx;
      CHECK(std::abs(px) <= 16.0 * len * kEps * std::sqrt(xn));
    }
  }
}

TEST_CASE("apply_reflector_classic annihilates its own column") {
  Matrix a(3, 1);
  a(0, 0) = -1;
  HouseholderReflector rf = make_reflector(VectorView::col_slice(a, 0, 0, 3));
  apply_reflector_classic(rf, a, 0, 0);
  CHECK(a(0, 0) == doctest::Approx(1.0).epsilon(4 * kEps));
  CHECK(std::abs(a(1, 0)) <= 4 * kEps);
  CHECK(std::abs(a(2, 0)) <= 4 * kEps);
}

TEST_CASE("coordinate reflector negates the first active row") {
  HouseholderReflector rf;
  rf.v = {1, 0, 0};
  Matrix a = random_matrix(3, 3, 2);
  Matrix before = a;
  apply_reflector_classic(rf, a, 0, 0);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(a(0, j) == doctest::Approx(-before(0, j)).epsilon(1e-15));
    CHECK(a(1, j) == before(1, j));
    CHECK(a(2, j) == before(2, j));
  }
}

TEST_CASE("classic apply agrees with the explicit P oracle") {
  std::vector<double> x = {-1, 0.5, 0.25};
  HouseholderReflector rf = make_reflector(VectorView(x));
  Matrix block = random_matrix(3, 2, 31);
  Matrix expl = block;
  // P = I - 2 v v^T applied by dense multiply
  Matrix p = Matrix::identity(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) p(i, j) -= 2.0 * rf.v[i] * rf.v[j];
  Matrix oracle = gemm(p, expl);
  apply_reflector_classic(rf, block, 0, 0);
  const double na = oracle.frobenius_norm();
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(block.data()[k] - oracle.data()[k]) <= 8 * kEps * na);
}

TEST_CASE("reflector involution restores the block") {
  std::vector<double> x = {2, -1, 3, 0.5};
  HouseholderReflector rf = make_reflector(VectorView(x));
  Matrix a = random_matrix(4, 3, 41);
  Matrix before = a;
  apply_reflector_classic(rf, a, 0, 0);
  apply_reflector_classic(rf, a, 0, 0);
  const double na = before.frobenius_norm();
  for (std::size_t k = 0; k < 12; ++k)
    CHECK(std::abs(a.data()[k] - before.data()[k]) <= 16 * kEps * na);
}

TEST_CASE("geqr2 on identity and diagonal inputs") {
  QrFactorization fi = geqr2(Matrix::identity(4));
  Matrix ri = fi.r();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(std::abs(ri(i, j)) - (i == j ? 1.0 : 0.0)) <= 16 * kEps);
  CHECK(residual_rel(Matrix::identity(4), fi) <= 64 * 4 * kEps);

  Matrix d(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 3;
  QrFactorization fd = geqr2(d);
  Matrix rd = fd.r();
  CHECK(std::abs(std::abs(rd(0, 0)) - 2.0) <= 16 * kEps);
  CHECK(std::abs(std::abs(rd(1, 1)) - 3.0) <= 16 * kEps);
  CHECK(residual_rel(d, fd) <= 64 * 2 * kEps);
}

TEST_CASE("geqr2 on the rank-deficient 3x3 ramp") {
  Matrix a(3, 3);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) a(i, j) = static_cast<double>(i + 1 + 3 * j);
  QrFactorization f = geqr2(a);
  CHECK(residual_rel(a, f) <= 64 * 3 * kEps);
  CHECK(std::abs(f.r()(2, 2)) <= 64 * kEps * a.frobenius_norm());
}

TEST_CASE("geqr2 rejects wide matrices") {
  CHECK_THROWS_AS(geqr2(Matrix(2, 3)), DimensionError);
}

TEST_CASE("geqrf agrees with geqr2 for every block size") {
  Matrix a = random_matrix(24, 16, 13);
  QrFactorization ref = geqr2(a);
  const double na = a.frobenius_norm();
  for (std::size_t bs : {std::size_t{1}, std::size_t{4}, std::size_t{7}, std::size_t{16}}) {
    QrFactorization f = geqrf(a, bs);
    Matrix r1 = ref.r(), r2 = f.r();
    for (std::size_t j = 0; j < 16; ++j)
      for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(r1(i, j) - r2(i, j)) <= 128.0 * 16 * kEps * na);
  }
}

TEST_CASE("geqrf random 64x64 residual") {
  Matrix a = random_matrix(64, 64, 99);
  QrFactorization f = geqrf(a, 8);
  CHECK(residual_rel(a, f) <= 64.0 * 64 * kEps);
  CHECK(orth_err(f) <= 64.0 * 64 * kEps);
}

TEST_CASE("form_q basics") {
  QrFactorization fi = geqr2(Matrix::identity(3));
  Matrix q = fi.form_q();
  Matrix r = fi.r();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double qr = 0;
      for (std::size_t k = 0; k < 3; ++k) qr += q(i, k) * r(k, j);
      CHECK(std::abs(qr - (i == j ? 1.0 : 0.0)) <= 16 * kEps);
    }

  Matrix a(2, 1);
  a(0, 0) = 3;
  a(1, 0) = 4;
  QrFactorization f = geqr2(a);
  Matrix q2 = f.form_q();
  const double sgn = f.r()(0, 0) > 0 ? 1.0 : -1.0;
  CHECK(std::abs(std::abs(f.r()(0, 0)) - 5.0) <= 16 * kEps);
  CHECK(q2(0, 0) * sgn == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(q2(1, 0) * sgn == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("triangularity is exact below the diagonal") {
  Matrix a = random_matrix(12, 9, 57);
  for (const QrFactorization& f : {geqr2(a), geqrf(a, 4)}) {
    Matrix r = f.r();
    for (std::size_t j = 0; j < r.cols(); ++j)
      for (std::size_t i = j + 1; i < r.rows(); ++i) CHECK(r(i, j) == 0.0);
  }
}

TEST_CASE("backward error over random shapes") {
  std::uint64_t seed = 1000;
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{8, 8}, {16, 12}, {33, 20}, {64, 64}}) {
    Matrix a = random_matrix(m, n, seed++);
    for (const QrFactorization& f : {geqr2(a), geqrf(a, 6)}) {
      CHECK(residual_rel(a, f) <= 64.0 * n * kEps);
      CHECK(orth_err(f) <= 64.0 * n * kEps);
    }
  }
}
