#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "atomfringe/states.hpp"

namespace atomfringe {

/// Collective modes of two atoms at separation u = k0 r. Frequencies are
/// detunings from the bare transition and, like the widths, in units of Gamma.
struct PairCoupling {
  double u;
  double f;
  double g;
  double omega_plus;
  double omega_minus;
  double gamma_plus;
  double gamma_minus;

  /// |Delta omega| / Gamma_{+-} = |g / (1 +- f)|
  double peak_separation_ratio_plus() const;
  double peak_separation_ratio_minus() const;
};

/// Throws DomainError for u <= 0 or non-finite u.
PairCoupling eigenmodes_two(double u);

/// Restores the prefactor Gamma*omega/((2 pi)^2 k0^3) dropped by default.
/// omega0 is the bare transition frequency in units of Gamma, k0 the wavenumber.
struct AbsoluteUnits {
  double omega0;
  double k0;
};

struct SpectrumWeights {
  double b_plus;
  double b_minus;
};

/// Direction-dependent weights of the super- and subradiant lines; chi = k.r.
SpectrumWeights spectrum_weights_two(const TwoQubitBlochState& state, double u, double chi);

/// Lorentzian factor 1/((omega - omega_c)^2 + (gamma/2)^2)
double lorentzian(double omega, double center, double width);

double emission_spectrum_two(const TwoQubitBlochState& state, double u, double omega, double chi,
                             const std::optional<AbsoluteUnits>& units = std::nullopt);

struct FringeParams {
  double xi_plus;
  double xi_minus;
  double eta;
  double theta0;

  /// sqrt(xi_minus^2 + eta^2)
  double amplitude() const;
  /// (1/4)[xi_plus + amplitude cos(chi - theta0)], equal to the emission spectrum.
  double intensity(double chi) const;
};

FringeParams fringe_params_two(const TwoQubitBlochState& state, double u, double omega);

struct FringeProfile {
  FringeParams params;
  std::vector<std::pair<double, double>> samples;  // (chi, intensity)
  double imax;
  double imin;
};

/// Samples the fringe on n evenly spaced phases over [chi_lo, chi_hi].
FringeProfile fringe_profile_two(const TwoQubitBlochState& state, double u, double omega,
                                 double chi_lo, double chi_hi, int n);

enum class VisibilityMode { formal, physical };

/// formal: sqrt(xi_-^2 + eta^2)/xi_+. physical: extrema over the reachable phases chi in [-u, u].
double visibility_two(const TwoQubitBlochState& state, double u, double omega,
                      VisibilityMode mode = VisibilityMode::formal);

/// Grid scan of the emission spectrum plus Brent refinement around the extrema.
/// physical scans [-u, u]; formal scans one period [0, 2 pi). n_grid >= 1000.
double visibility_two_bruteforce(const TwoQubitBlochState& state, double u, double omega,
                                 int n_grid, VisibilityMode mode = VisibilityMode::formal);

struct DeviationOptions {
  int grid = 64;
  int refine_candidates = 4;
  VisibilityMode mode = VisibilityMode::formal;
};

struct DeviationResult {
  double max_dev;
  double theta_star;
  double phi_star;
};

/// max over (theta, phi) of |V - C| at fixed purity s.
DeviationResult deviation_max(double s, double u, double omega = 0.0,
                              const DeviationOptions& options = {});

struct DeviationRow {
  double u;
  double s;
  DeviationResult result;
  double s0_analytic;
};

/// 2u|sin u|/(1 + u^2)
double deviation_s0_analytic(double u);

/// Rows ordered by s, then u. Results do not depend on the thread count.
std::vector<DeviationRow> deviation_scan(const std::vector<double>& s_values,
                                         const std::vector<double>& u_values, double omega = 0.0,
                                         const DeviationOptions& options = {}, int threads = 0);

}  // namespace atomfringe
