// SPDX-License-Identifier: Apache-2.0
//
// Bloch-parametrized spin observables, sharp projectors, unsharp dichotomic
// effects and their square roots, and the Luders post-measurement update.

#pragma once

#include "trishare/qcore.hpp"

#include <cmath>

namespace trishare {

/// Unit direction on the Bloch sphere, (theta, phi) in [0,pi] x [0,2pi].
/// Cartesian components (sin t cos p, sin t sin p, cos t).
struct BlochDirection {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d unit_vector() const;
};

inline BlochDirection bloch_z() { return {0.0, 0.0}; }
inline BlochDirection bloch_x() { return {M_PI / 2.0, 0.0}; }
inline BlochDirection bloch_y() { return {M_PI / 2.0, M_PI / 2.0}; }

/// Sharpness parameter lambda in (0, 1]. precision() is lambda itself and
/// quality_factor() is sqrt(1 - lambda^2), so precision^2 + quality^2 = 1
/// holds by construction.
class Sharpness {
 public:
  explicit Sharpness(double lambda);

  double lambda() const { return lambda_; }
  double precision() const { return lambda_; }
  double quality_factor() const { return std::sqrt(1.0 - lambda_ * lambda_); }
  bool is_sharp() const { return lambda_ == 1.0; }

 private:
  double lambda_;
};

inline Sharpness sharp() { return Sharpness(1.0); }

/// One effect of the dichotomic unsharp measurement along `direction`:
/// lambda P_outcome + (1 - lambda) I/2, with eigenvalues (1 +/- lambda)/2.
struct Effect {
  Matrix matrix;
  BlochDirection direction;
  int outcome;  // +1 or -1
  Sharpness sharpness;
};

/// Spin observable d . sigma (2x2 Hermitian, traceless, eigenvalues +/-1).
Matrix observable(const BlochDirection& d);

/// Rank-1 projector (I + outcome d . sigma) / 2.
Matrix projector(const BlochDirection& d, int outcome);

Effect effect(const BlochDirection& d, int outcome, Sharpness s);

/// Square root of the effect in closed form:
/// sqrt((1+l)/2) P_outcome + sqrt((1-l)/2) P_{-outcome}.
Matrix sqrt_effect(const BlochDirection& d, int outcome, Sharpness s);

/// Born probability Tr[E rho] of the outcome, without updating the state.
double outcome_probability(const DensityMatrix& rho, Party party, const BlochDirection& d,
                           int outcome, Sharpness s);

struct LudersResult {
  DensityMatrix state;
  double probability;
};

/// Luders update: (sqrtE rho sqrtE) / Tr[E rho] together with the Born
/// probability Tr[E rho]. The effect acts on `party`'s tensor slot, padded
/// with identities elsewhere; for a single-qubit state every party label
/// addresses the only qubit. Throws std::runtime_error when the outcome
/// probability is below kZeroProbability.
LudersResult luders_update(const DensityMatrix& rho, Party party, const BlochDirection& d,
                           int outcome, Sharpness s);

}  // namespace trishare
