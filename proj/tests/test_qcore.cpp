// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "trishare/qcore.hpp"

using namespace trishare;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("kron identity and projector composition") {
  const Matrix i2 = identity_matrix(2);
  CHECK((kron(i2, i2) - identity_matrix(4)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix p = diag2(1.0, 0.0);
  const Matrix composed = kron(p, p);
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  CHECK((composed - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron(sigma_z, sigma_z) fixes the two-qubit phi+ state") {
  // Independent 4x4 arithmetic: apply the matrix to (|00> + |11>)/sqrt(2).
  const Matrix zz = kron(pauli_z(), pauli_z());
  Vector phi_plus = Vector::Zero(4);
  phi_plus(0) = phi_plus(3) = 1.0 / std::sqrt(2.0);
  const Vector mapped = zz * phi_plus;
  CHECK((mapped - phi_plus).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace of GHZ marginals") {
  Vector ghz = Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = DensityMatrix::pure(ghz);

  const DensityMatrix charlie = partial_trace(rho, {Party::Charlie});
  CHECK((charlie.matrix() - 0.5 * identity_matrix(2)).cwiseAbs().maxCoeff() < 1e-15);

  const DensityMatrix ab = partial_trace(rho, {Party::Alice, Party::Bob});
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  CHECK((ab.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace of the W state onto Charlie") {
  // Hand expansion: qubit C is |1> in one of the three branches, |0> in two,
  // and every cross term dies under the A/B trace.
  Vector w = Vector::Zero(8);
  w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
  const DensityMatrix rho = DensityMatrix::pure(w);
  const DensityMatrix charlie = partial_trace(rho, {Party::Charlie});
  CHECK(std::abs(charlie.matrix()(0, 0).real() - 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(charlie.matrix()(1, 1).real() - 1.0 / 3.0) < 1e-14);
  CHECK(std::abs(charlie.matrix()(0, 1)) < 1e-14);
}

TEST_CASE("partial trace errors") {
  Vector ghz = Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = DensityMatrix::pure(ghz);
  CHECK_THROWS_WITH_AS(partial_trace(rho, {}), doctest::Contains("no subsystem retained"),
                       std::invalid_argument);
}

TEST_CASE("trace_product examples") {
  Vector ghz = Vector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = DensityMatrix::pure(ghz);
  CHECK(std::abs(trace_product(identity_matrix(8), rho.matrix()) - Complex{1.0, 0.0}) < 1e-14);

  // Rank-1 projector is idempotent under the trace.
  Vector v(2);
  v << Complex{0.6, 0.0}, Complex{0.0, 0.8};
  const Matrix p = v * v.adjoint();
  CHECK(std::abs(trace_product(p, p) - Complex{1.0, 0.0}) < 1e-14);

  // Unbiased effect on the maximally mixed state.
  const Matrix e = diag2(0.75, 0.25);
  CHECK(std::abs(trace_product(e, 0.5 * identity_matrix(2)) - Complex{0.5, 0.0}) < 1e-15);

  CHECK_THROWS_AS(trace_product(identity_matrix(2), identity_matrix(4)), std::invalid_argument);
}

TEST_CASE("trace_product matches the explicit product on random 8x8 inputs") {
  auto rng = rng_stream(7, "property-draw", 0);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix a = testing::random_hermitian(rng, 8);
    const Matrix b = testing::random_hermitian(rng, 8);
    const Complex direct = trace_product(a, b);
    const Complex full = (a * b).trace();
    CHECK(std::abs(direct - full) < 1e-12);
  }
}

TEST_CASE("partial trace of a Kronecker product splits into factor traces") {
  auto rng = rng_stream(8, "property-draw", 0);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix left = testing::random_hermitian(rng, 4);
    Matrix right = testing::random_hermitian(rng, 2);
    right /= right.trace();  // trace-normalized second factor

    const Matrix keep_first = partial_trace_matrix(kron(left, right), {Party::Alice, Party::Bob});
    CHECK((keep_first - left).cwiseAbs().maxCoeff() < 1e-12);

    Matrix left2 = testing::random_hermitian(rng, 2);
    Matrix right2 = testing::random_hermitian(rng, 4);
    right2 /= right2.trace();
    const Matrix keep_a = partial_trace_matrix(kron(left2, right2), {Party::Alice});
    CHECK((keep_a - left2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("density matrix structural checks") {
  CHECK_NOTHROW(DensityMatrix::basis_state(8, 0).validate());

  Matrix bad_trace = Matrix::Zero(2, 2);
  bad_trace(0, 0) = 2.0;
  CHECK_THROWS_WITH_AS(DensityMatrix{bad_trace}, doctest::Contains("trace"),
                       std::invalid_argument);

  Matrix not_hermitian = Matrix::Zero(2, 2);
  not_hermitian(0, 0) = 1.0;
  not_hermitian(0, 1) = Complex{0.0, 0.5};
  not_hermitian(1, 0) = Complex{0.0, 0.5};
  CHECK_THROWS_WITH_AS(DensityMatrix{not_hermitian}, doctest::Contains("Hermitian"),
                       std::invalid_argument);

  // Hermitian, unit trace, but indefinite.
  const Matrix indefinite = [] {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    return m;
  }();
  const DensityMatrix sneaky{indefinite};
  CHECK_THROWS_WITH_AS(sneaky.validate(), doctest::Contains("positive semidefinite"),
                       std::invalid_argument);

  CHECK_THROWS_AS(DensityMatrix{Matrix(Matrix::Identity(3, 3))}, std::invalid_argument);
}
