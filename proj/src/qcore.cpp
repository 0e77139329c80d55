// SPDX-License-Identifier: Apache-2.0

#include "trishare/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace trishare {

namespace {

Matrix make_pauli(int which) {
  Matrix m(2, 2);
  const Complex i{0.0, 1.0};
  switch (which) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

const Matrix& pauli_x() {
  static const Matrix m = make_pauli(1);
  return m;
}

const Matrix& pauli_y() {
  static const Matrix m = make_pauli(2);
  return m;
}

const Matrix& pauli_z() {
  static const Matrix m = make_pauli(3);
  return m;
}

Matrix identity_matrix(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Complex trace_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("trace_product: dimension mismatch");
  Complex sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) sum += a(i, j) * b(j, i);
  return sum;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double smallest_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Matrix partial_trace_matrix(const Matrix& op, std::initializer_list<Party> keep) {
  if (keep.size() == 0) throw std::invalid_argument("partial_trace: no subsystem retained");
  if (op.rows() != 8 || op.cols() != 8)
    throw std::invalid_argument("partial_trace: expected an 8x8 three-qubit operator");

  bool kept[3] = {false, false, false};
  for (Party p : keep) kept[static_cast<int>(p)] = true;

  int kept_count = 0;
  for (bool k : kept) kept_count += k ? 1 : 0;
  const Eigen::Index out_dim = Eigen::Index{1} << kept_count;

  // Index of |abc> is 4a + 2b + c; bit t of the index is qubit (2 - t).
  auto bit = [](Eigen::Index idx, int qubit) { return (idx >> (2 - qubit)) & 1; };

  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Eigen::Index r = 0; r < 8; ++r) {
    for (Eigen::Index c = 0; c < 8; ++c) {
      bool diagonal_on_traced = true;
      Eigen::Index out_r = 0, out_c = 0;
      for (int q = 0; q < 3; ++q) {
        if (kept[q]) {
          out_r = (out_r << 1) | bit(r, q);
          out_c = (out_c << 1) | bit(c, q);
        } else if (bit(r, q) != bit(c, q)) {
          diagonal_on_traced = false;
          break;
        }
      }
      if (diagonal_on_traced) out(out_r, out_c) += op(r, c);
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Party> keep) {
  return DensityMatrix(partial_trace_matrix(rho.matrix(), keep));
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4 && m_.rows() != 8))
    throw std::invalid_argument("DensityMatrix: dimension must be 2, 4, or 8");
  const double herm = hermiticity_defect(m_);
  if (herm > kStructuralTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: not Hermitian (defect " << herm << ")";
    throw std::invalid_argument(msg.str());
  }
  const double trace_err = std::abs(m_.trace() - Complex{1.0, 0.0});
  if (trace_err > kStructuralTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace differs from 1 by " << trace_err;
    throw std::invalid_argument(msg.str());
  }
}

int DensityMatrix::num_qubits() const {
  switch (m_.rows()) {
    case 2: return 1;
    case 4: return 2;
    default: return 3;
  }
}

void DensityMatrix::validate() const {
  const double min_eig = smallest_eigenvalue(m_);
  if (min_eig < -kPsdSlack) {
    std::ostringstream msg;
    msg << "DensityMatrix: not positive semidefinite (smallest eigenvalue " << min_eig << ")";
    throw std::invalid_argument(msg.str());
  }
}

DensityMatrix DensityMatrix::basis_state(Eigen::Index dim, Eigen::Index index) {
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double norm = psi.norm();
  if (norm <= 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  Vector unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

}  // namespace trishare
