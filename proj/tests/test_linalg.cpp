#include <cmath>
#include <limits>
#include <stdexcept>
#include <random>

#include <doctest.h>

#include "jamsim/linalg.hpp"

using namespace jamsim;

namespace {

// Independent largest-singular-value oracle: power iteration on M'M.
double power_iteration_sigma_max(const Matrix& m, int iters = 20000) {
  const Matrix gram = m.transpose() * m;
  const std::size_t n = gram.rows();
  Vector x(n, 1.0);
  x[0] = 1.37;  // avoid starting orthogonal to the top eigenvector
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector y = matvec(gram, x);
    const double nrm = norm2(y);
    if (nrm == 0.0) return 0.0;
    for (auto& v : y) v /= nrm;
    lambda = nrm;
    x = std::move(y);
  }
  return std::sqrt(lambda);
}

Matrix random_matrix(std::mt19937& gen, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = dist(gen);
  return m;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("jacobi matches the closed-form 2x2 eigenvalues") {
  const Matrix p{{0.7728, 0.8554}, {0.8554, 3.2649}};
  const SymmetricEigen eig = symmetric_eigen(p);

  // 2x2 symmetric closed form: mean +- sqrt(diff^2 + off^2).
  const double mean = 0.5 * (p(0, 0) + p(1, 1));
  const double half = std::sqrt(0.25 * (p(0, 0) - p(1, 1)) * (p(0, 0) - p(1, 1)) +
                                p(0, 1) * p(0, 1));
  CHECK(eig.values[0] == doctest::Approx(mean - half).epsilon(1e-13));
  CHECK(eig.values[1] == doctest::Approx(mean + half).epsilon(1e-13));
}

TEST_CASE("jacobi reconstructs the matrix and returns orthonormal vectors") {
  std::mt19937 gen(991);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + trial % 5;
    Matrix base = random_matrix(gen, n, n);
    const Matrix s = 0.5 * (base + base.transpose());
    const SymmetricEigen eig = symmetric_eigen(s);

    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = eig.values[i];
    const Matrix rebuilt = eig.vectors * d * eig.vectors.transpose();
    const Matrix gram = eig.vectors.transpose() * eig.vectors;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        CHECK(rebuilt(r, c) == doctest::Approx(s(r, c)).epsilon(1e-11));
        CHECK(gram(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).scale(1.0).epsilon(1e-11));
      }
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(eig.values[i] <= eig.values[i + 1]);
  }
}

TEST_CASE("spectral norm of the shift matrix is 1") {
  CHECK(spectral_norm(Matrix{{0.0, 1.0}, {0.0, 0.0}}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral norm agrees with power iteration") {
  std::mt19937 gen(4242);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const Matrix m = random_matrix(gen, n, n);
    CHECK(spectral_norm(m) ==
          doctest::Approx(power_iteration_sigma_max(m)).epsilon(1e-9));
  }
}

TEST_CASE("p_vector_norm matches the quadratic form") {
  const Matrix p{{2.0, 0.5}, {0.5, 1.0}};
  const Vector x{1.0, -3.0};
  const double expected = std::sqrt(2.0 * 1.0 + 2.0 * 0.5 * 1.0 * -3.0 + 1.0 * 9.0);
  CHECK(p_vector_norm(x, p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("shape mismatches throw") {
  CHECK_THROWS_AS(Matrix({{1.0, 2.0}, {3.0}}), std::invalid_argument);
  CHECK_THROWS_AS((Matrix{{1.0, 2.0}} * Matrix{{1.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(symmetric_eigen(Matrix(2, 3)), std::invalid_argument);
}

}  // TEST_SUITE
