#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "atomfringe/states.hpp"
#include "atomfringe/two_atom.hpp"

namespace atomfringe {

/// Equilateral triangle of side u = k0 r in the xy plane, lengths in units of 1/k0.
class TriangleGeometry {
 public:
  explicit TriangleGeometry(double u);

  double u() const noexcept { return u_; }
  /// x_j = (u/sqrt3)(sin t_j, -cos t_j, 0), t_j = 2 pi j / 3, j = 0, 1, 2.
  Eigen::Vector3d position(int j) const;
  /// r_j = u (cos t_j, sin t_j, 0)
  Eigen::Vector3d edge(int j) const;
  /// Phases theta_i = k.(x_j - x_k) for cyclic (i, j, k), with k = u * khat.
  std::array<double, 3> phases(const Eigen::Vector3d& khat) const;

 private:
  double u_;
};

struct TriadCoupling {
  double u;
  double f;
  double g;
  double omega_plus;
  double omega_minus;
  double gamma_plus;
  double gamma_minus;
  double h_plus;
  double h_minus;
  double h_zero;
};

/// Throws DomainError for u <= 0.
TriadCoupling eigenmodes_three(double u);

struct TriadWeights {
  double d_plus;
  double d_minus;
};

/// Lorentzian weights for emission along khat (unit vector). Requires a state without phases.
TriadWeights spectrum_weights_three(const WLikeState& state, const TriangleGeometry& geom,
                                    const Eigen::Vector3d& khat);

double emission_spectrum_three(const WLikeState& state, const TriangleGeometry& geom, double omega,
                               const Eigen::Vector3d& khat,
                               const std::optional<AbsoluteUnits>& units = std::nullopt);

/// Large-separation form: (1/2) L(omega) [1 + 2 sum c_i c_j cos k.(x_i - x_j)], phases included.
double farfield_emission_three(const WLikeState& state, const TriangleGeometry& geom,
                               double omega, const Eigen::Vector3d& khat);

/// 1 + 2(c2 c3 cos t1 + c3 c1 cos t2 + c1 c2 cos t3) with t3 = -t1 - t2.
/// Phases enter as t1 -> t1 - phi2 + phi3, t2 -> t2 - phi3, t3 -> t3 + phi2.
double farfield_intensity(const WLikeState& state, double theta1, double theta2);

struct ThreeExtrema {
  double imax;
  double imin;
  std::array<double, 3> angles;  // minimizing (theta1, theta2, theta3), sum = 0 mod 2 pi
};

/// Closed-form extrema for the phase-free pattern.
ThreeExtrema fringe_extrema_three(const WLikeState& state);

double visibility_three(const WLikeState& state);

/// Torus grid (n_grid per axis, >= 256) plus simplex refinement.
double visibility_three_bruteforce(const WLikeState& state, int n_grid);

}  // namespace atomfringe
