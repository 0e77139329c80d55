// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra for 1-3 qubit operators: Pauli matrices,
// Kronecker composition, traces, partial traces, and density-matrix
// structure checks. Qubit ordering is A (x) B (x) C with big-endian basis
// labels: |abc> sits at index 4a + 2b + c.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace trishare {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Tolerance for structural identities (Hermiticity, trace, completeness).
inline constexpr double kStructuralTol = 1e-12;
// Slack allowed on the smallest eigenvalue of a positive-semidefinite check.
inline constexpr double kPsdSlack = 1e-10;
// Below this, a measurement outcome is treated as having zero probability.
inline constexpr double kZeroProbability = 1e-14;

/// Tensor-product slot of a party. Alice acts on the first qubit, Bob on
/// the second, the Charlie chain on the third.
enum class Party { Alice = 0, Bob = 1, Charlie = 2 };

const Matrix& pauli_x();
const Matrix& pauli_y();
const Matrix& pauli_z();
Matrix identity_matrix(Eigen::Index dim);

/// Kronecker product a (x) b; result dims are the products of the inputs'.
Matrix kron(const Matrix& a, const Matrix& b);

/// Tr[a b] accumulated as sum_{ij} a(i,j) b(j,i), without forming the
/// product. Throws std::invalid_argument on a dimension mismatch.
Complex trace_product(const Matrix& a, const Matrix& b);

class DensityMatrix;

/// Partial trace of a 3-qubit operator onto the parties listed in `keep`
/// (order-insensitive; the result keeps A-before-B-before-C ordering).
/// Works on arbitrary 8x8 matrices, normalized or not.
Matrix partial_trace_matrix(const Matrix& op, std::initializer_list<Party> keep);

/// A validated quantum state: Hermitian, unit trace, positive semidefinite,
/// of dimension 2, 4, or 8. Construction performs the cheap structural
/// checks; validate() additionally runs the eigenvalue PSD check.
class DensityMatrix {
 public:
  /// Builds and structurally checks a density matrix. Throws
  /// std::invalid_argument naming the violated property.
  explicit DensityMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int num_qubits() const;

  /// Full invariant check including the smallest-eigenvalue PSD test.
  /// Throws std::invalid_argument on failure.
  void validate() const;

  /// Pure computational-basis state |index><index| of the given dimension.
  static DensityMatrix basis_state(Eigen::Index dim, Eigen::Index index);
  /// |psi><psi| for an arbitrary ket (normalized internally).
  static DensityMatrix pure(const Vector& psi);

 private:
  Matrix m_;
};

/// Partial trace over the complement of `keep`; trace and Hermiticity are
/// preserved. Throws std::invalid_argument on an empty keep set.
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Party> keep);

/// max_ij |m(i,j) - conj(m(j,i))|.
double hermiticity_defect(const Matrix& m);

/// Smallest eigenvalue of a Hermitian matrix (self-adjoint solve).
double smallest_eigenvalue(const Matrix& m);

}  // namespace trishare
