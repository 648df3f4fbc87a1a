#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "atomfringe/states.hpp"
#include "atomfringe/three_atom.hpp"
#include "atomfringe/two_atom.hpp"

namespace atomfringe {

/// filtered: every photon is detected at the fixed detuning `omega`.
/// spectral: omega is drawn from the line mixture on a window 50 Gamma beyond the line centres.
enum class OmegaMode { filtered, spectral };

struct PhotonSample {
  double omega;
  Eigen::Vector3d direction;
};

struct SimOptions {
  OmegaMode mode = OmegaMode::filtered;
  double omega = 0.0;
  double window = 50.0;
  std::size_t chunk = 1 << 16;
  int threads = 0;
};

/// Two atoms separated along z, so chi = k.r = u * direction.z.
std::vector<PhotonSample> sample_photons_two(const TwoQubitBlochState& state, double u,
                                             std::size_t n, std::uint64_t seed,
                                             const SimOptions& options = {});

/// Requires a phase-free state (the finite-distance weights are defined for real amplitudes).
std::vector<PhotonSample> sample_photons_three(const WLikeState& state,
                                               const TriangleGeometry& geom, std::size_t n,
                                               std::uint64_t seed, const SimOptions& options = {});

/// Detuning window [lo, hi] used by spectral mode for the given line centres.
std::array<double, 2> spectral_window(double center_a, double center_b, double half_width);

struct FringeHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  /// Density estimate count / (N width) and its Poisson standard error.
  double intensity(std::size_t i) const;
  double stderr_of(std::size_t i) const;
};

FringeHistogram make_histogram(double lo, double hi, std::size_t bins);
void fill(FringeHistogram& h, double x);

/// Histogram of chi = u d_z over [-u, u] without storing the photons.
FringeHistogram simulate_fringe_two(const TwoQubitBlochState& state, double u, std::size_t n,
                                    std::uint64_t seed, std::size_t bins,
                                    const SimOptions& options = {});

/// Probabilities of each histogram bin under the analytic two-atom fringe at `omega`.
std::vector<double> fringe_bin_probabilities_two(const TwoQubitBlochState& state, double u,
                                                 double omega, const FringeHistogram& h);

struct VisibilityEstimate {
  double value;
  double sigma;
  double amplitude;
  double phase;
  double offset;
};

struct EstimateOptions {
  int bootstrap = 200;
  std::uint64_t seed = 0x5eed;
};

/// First-harmonic least-squares fit of the bin densities (bin-averaged cos/sin regressors),
/// extrema of the fit over the histogram range, multinomial bootstrap for sigma.
/// Needs >= 32 bins and >= 100 counts.
VisibilityEstimate estimate_visibility(const FringeHistogram& h,
                                       const EstimateOptions& options = {});

struct GoodnessOfFit {
  double chi2;
  int dof;
  double p_value;
};

/// Pearson chi-square against expected bin probabilities; bins with expectation below
/// min_expected are pooled with their neighbours. fitted_parameters reduces the dof.
GoodnessOfFit chi_square_gof(const std::vector<std::uint64_t>& counts,
                             const std::vector<double>& probabilities, double min_expected = 5.0,
                             int fitted_parameters = 0);

}  // namespace atomfringe
