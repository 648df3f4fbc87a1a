#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "atomfringe/states.hpp"

namespace atomfringe {

// Closed forms. Atom indices are 0-based: cut j = 0 separates atom 1 from atoms 2 and 3.

/// s sin(theta)
double concurrence_bloch(const TwoQubitBlochState& state);

/// 2 c_j sqrt(1 - c_j^2)
double negativity_cut(const WLikeState& state, int j);
double negativity_max(const WLikeState& state);

/// (8/3)(c1^2 c2^2 + c2^2 c3^2 + c3^2 c1^2)
double mixedness(const WLikeState& state);

/// 1 - 4R^2 when the triangle with sides c_j is non-obtuse, else 1 - c1^2.
double geometric_measure_wlike(const WLikeState& state);

/// (4/3) sum_j c_j^4 (sqrt(1 + 4 c1^2 c2^2 c3^2 / c_j^6) - 1)
double three_pi(const WLikeState& state);

// General density-matrix oracles.

/// Wootters concurrence of a two-qubit state.
double concurrence_wootters(const DensityMatrix& rho);

/// Partial transpose on `qubit` of an n-qubit operator.
Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& m, int qubit);

/// Trace over `qubit`; the remaining qubits keep their order.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& m, int qubit);

/// Single-qubit reduction of an n-qubit state.
Eigen::Matrix2cd reduced_state(const DensityMatrix& rho, int qubit);

/// ||rho^{T_q}||_1 - 1
double negativity_partial_transpose(const DensityMatrix& rho, int qubit);

/// Mean of 2(1 - Tr rho_j^2) over single-qubit reductions.
double mixedness_from_reductions(const DensityMatrix& rho);

/// (1/3) sum_j [N_j^2 - 2 N^2(Tr_j rho)] for a three-qubit state.
double three_pi_from_negativities(const DensityMatrix& rho);

struct GeometricOptions {
  int restarts = 32;
  std::uint64_t seed = 20240613;
  double agreement = 1e-9;
};

/// 1 - max over product states of |<phi|psi>|^2, by multi-start alternating maximization.
/// Throws ConvergenceError unless at least two restarts reach the same optimum.
double geometric_measure_numeric(const DensityMatrix& psi, const GeometricOptions& options = {});

}  // namespace atomfringe
