#pragma once

#include <array>
#include <complex>
#include <span>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

namespace atomfringe {

using cdouble = std::complex<double>;

/// One-excitation state of two atoms in the {|eg>, |ge>} subspace,
///
///   rho = 1/2 [[1 + sz, sx - i sy], [sx + i sy, 1 - sz]],
///
/// with (sx, sy, sz) = s (sin th cos ph, sin th sin ph, cos th).
class TwoQubitBlochState {
 public:
  /// Throws InvalidState unless 0 <= s <= 1 and 0 <= theta <= pi. phi is wrapped to [0, 2pi).
  TwoQubitBlochState(double s, double theta, double phi);

  static TwoQubitBlochState from_vector(double sx, double sy, double sz);

  double s() const noexcept { return s_; }
  double theta() const noexcept { return theta_; }
  double phi() const noexcept { return phi_; }

  double sx() const noexcept;
  double sy() const noexcept;
  double sz() const noexcept;
  Eigen::Vector3d bloch_vector() const;

  /// <eg| rho |ge> = (sx - i sy) / 2
  cdouble rho01() const noexcept;
  Eigen::Matrix2cd matrix() const;

 private:
  double s_;
  double theta_;
  double phi_;
};

/// Canonical W-like state c1|egg> + c2 e^{i phi2}|geg> + c3 e^{i phi3}|gge>
/// with c1 >= c2 >= c3 > 0 and unit norm.
class WLikeState {
 public:
  /// Normalizes (c1, c2, c3) and checks the ordering; throws InvalidState
  /// for negative, zero, or unordered amplitudes.
  WLikeState(double c1, double c2, double c3, double phi2 = 0.0, double phi3 = 0.0);

  const std::array<double, 3>& c() const noexcept { return c_; }
  double c(std::size_t j) const { return c_.at(j); }
  double phi2() const noexcept { return phi2_; }
  double phi3() const noexcept { return phi3_; }
  bool has_phases() const noexcept { return phi2_ != 0.0 || phi3_ != 0.0; }

  double mean_amplitude() const noexcept { return (c_[0] + c_[1] + c_[2]) / 3.0; }
  double semi_perimeter() const noexcept { return (c_[0] + c_[1] + c_[2]) / 2.0; }

  /// Complex amplitudes with phases attached (atom 1 carries the global phase).
  std::array<cdouble, 3> amplitudes() const;

 private:
  std::array<double, 3> c_;
  double phi2_;
  double phi3_;
};

/// Result of mapping arbitrary complex amplitudes onto canonical form.
///
/// `permutation[k]` is the input index that lands in canonical slot k and
/// `phases[k]` is that amplitude's argument, so that
/// input[permutation[k]] == norm * state.c(k) * exp(i phases[k]).
struct Canonicalized {
  WLikeState state;
  std::array<int, 3> permutation;
  std::array<double, 3> phases;
  double norm;
};

Canonicalized canonicalize(std::span<const cdouble, 3> amplitudes);

/// Dense density matrix of 1, 2 or 3 qubits. Basis index bit (n-1-q) holds
/// qubit q, with |g> = 0 and |e> = 1, so |egg> is index 4.
class DensityMatrix {
 public:
  static constexpr double kPsdTolerance = 1e-10;

  /// Validates Hermiticity, unit trace and eigenvalues >= -tolerance.
  /// Eigenvalues inside (-tolerance, 0) are clipped to zero.
  explicit DensityMatrix(const Eigen::MatrixXcd& m, double tolerance = kPsdTolerance);

  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  int qubits() const noexcept;
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  bool is_pure(double tol = 1e-10) const;

 private:
  Eigen::MatrixXcd m_;
};

/// 4x4 embedding of the Bloch state in the two-qubit space (|eg> = 2, |ge> = 1).
DensityMatrix embed(const TwoQubitBlochState& state);
/// 8-dim state vector of a W-like state, phases included.
Eigen::VectorXcd state_vector(const WLikeState& state);
DensityMatrix embed(const WLikeState& state);

using AtomicState = std::variant<TwoQubitBlochState, WLikeState>;

nlohmann::json to_json(const TwoQubitBlochState& state);
nlohmann::json to_json(const WLikeState& state);
nlohmann::json to_json(const AtomicState& state);

/// Parses {"type":"bloch","s","theta","phi"} or {"type":"wlike","c":[3],"phases":[2]}.
/// A "wlike" record may list amplitudes in any order; they are canonicalized.
/// Throws InvalidState on malformed input.
AtomicState state_from_json(const nlohmann::json& j);

}  // namespace atomfringe
