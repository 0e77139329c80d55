// SPDX-License-Identifier: Apache-2.0

#include "trishare/measure.hpp"

#include <cmath>
#include <sstream>

namespace trishare {

namespace {

void check_outcome(int outcome) {
  if (outcome != 1 && outcome != -1)
    throw std::invalid_argument("outcome must be +1 or -1");
}

// Pads a single-qubit operator into the party's slot of a 1/2/3-qubit space.
Matrix embed(const Matrix& op, Party party, int num_qubits) {
  if (num_qubits == 1) return op;
  int slot = static_cast<int>(party);
  if (slot >= num_qubits)
    throw std::invalid_argument("luders_update: party slot exceeds state size");
  Matrix out = slot == 0 ? op : identity_matrix(2);
  for (int q = 1; q < num_qubits; ++q)
    out = kron(out, q == slot ? op : identity_matrix(2));
  return out;
}

}  // namespace

Eigen::Vector3d BlochDirection::unit_vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Sharpness::Sharpness(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) {
    std::ostringstream msg;
    msg << "sharpness must lie in (0, 1], got " << lambda;
    throw std::invalid_argument(msg.str());
  }
}

Matrix observable(const BlochDirection& d) {
  const Eigen::Vector3d n = d.unit_vector();
  return n.x() * pauli_x() + n.y() * pauli_y() + n.z() * pauli_z();
}

Matrix projector(const BlochDirection& d, int outcome) {
  check_outcome(outcome);
  return 0.5 * (identity_matrix(2) + static_cast<double>(outcome) * observable(d));
}

Effect effect(const BlochDirection& d, int outcome, Sharpness s) {
  check_outcome(outcome);
  Matrix m = s.lambda() * projector(d, outcome) + (1.0 - s.lambda()) * 0.5 * identity_matrix(2);
  return Effect{std::move(m), d, outcome, s};
}

Matrix sqrt_effect(const BlochDirection& d, int outcome, Sharpness s) {
  check_outcome(outcome);
  const double plus = std::sqrt((1.0 + s.lambda()) / 2.0);
  const double minus = std::sqrt((1.0 - s.lambda()) / 2.0);
  return plus * projector(d, outcome) + minus * projector(d, -outcome);
}

double outcome_probability(const DensityMatrix& rho, Party party, const BlochDirection& d,
                           int outcome, Sharpness s) {
  const Matrix padded = embed(effect(d, outcome, s).matrix, party, rho.num_qubits());
  return trace_product(padded, rho.matrix()).real();
}

LudersResult luders_update(const DensityMatrix& rho, Party party, const BlochDirection& d,
                           int outcome, Sharpness s) {
  const Matrix root = embed(sqrt_effect(d, outcome, s), party, rho.num_qubits());
  Matrix updated = root * rho.matrix() * root;
  const double probability = updated.trace().real();
  if (probability < kZeroProbability)
    throw std::runtime_error("outcome has zero probability; post-state undefined");
  updated /= probability;
  // Restore exact Hermiticity lost to rounding.
  updated = 0.5 * (updated + updated.adjoint().eval());
  return LudersResult{DensityMatrix(std::move(updated)), probability};
}

}  // namespace trishare
