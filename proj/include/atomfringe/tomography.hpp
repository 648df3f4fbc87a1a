#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atomfringe/states.hpp"

namespace atomfringe {

/// One fringe measurement of the two-atom pattern. sigma <= 0 means unweighted.
struct FringeSample {
  double chi;
  double omega;
  double u;
  double intensity;
  double sigma = 0.0;
};

/// Harmonic fit I = (K/4)[xi_+ + xi_- cos chi + eta sin chi] at one separation.
struct FringeFit {
  double u;
  double scale;  // K
  double sx;
  double q;      // sy - g sz
  Eigen::Matrix3d covariance;  // of (scale, sx, q)
  double residual;
};

/// Needs samples at a single u with at least three distinct phases.
FringeFit fit_fringe_two(const std::vector<FringeSample>& samples);

struct TwoAtomReconstruction {
  TwoQubitBlochState state;
  Eigen::Vector3d raw_vector;   // before projection onto s <= 1
  Eigen::Matrix3d covariance;   // of (sx, sy, sz)
  double scale;
  double residual;              // weighted RMS
  bool projected;
};

/// Linear least squares in (K, K sx, K sy, K sz) over samples at any set of separations.
/// At a single separation sy and sz are not separable and IllPosed is thrown.
TwoAtomReconstruction tomography_two_exact(const std::vector<FringeSample>& samples);

/// Generalized least squares over per-separation fits, each with its own scale K.
/// Suited to photon histograms, whose normalization differs between separations.
/// Needs fits at two or more distinct values of g.
TwoAtomReconstruction combine_fringe_fits(const std::vector<FringeFit>& fits);

/// First-order model 1 - 2f sx + (sx - 2f) cos chi + (sy - g sz) sin chi, unit amplitude.
double firstorder_fringe(const TwoQubitBlochState& state, double u, double chi);
/// atan((sy - g sz)/sx + 2 f sy / sx^2)
double firstorder_theta0(const TwoQubitBlochState& state, double u);

struct FirstOrderInput {
  double p0;        // chi = 0
  double p_pi;      // chi = pi
  double p_plus;    // chi = +pi/2
  double p_minus;   // chi = -pi/2
  double theta0;
};

struct FirstOrderReconstruction {
  TwoQubitBlochState state;
  Eigen::Vector3d raw_vector;
  double truncation_error;  // max(f, g)^2
  bool projected;
};

/// Three-step scheme: sx from chi in {0, pi}, sy - g sz from chi = +-pi/2, sy from theta0.
/// IllPosed when sx, f or g vanishes.
FirstOrderReconstruction tomography_two_firstorder(const FirstOrderInput& in, double u);

/// Reads the four canonical phases out of a sample set (omega = 0, one u).
FirstOrderInput firstorder_input(const std::vector<FringeSample>& samples, double theta0);

/// Far-field three-atom sample on the (theta1, theta2) torus.
struct TorusSample {
  double theta1;
  double theta2;
  double intensity;
  double sigma = 0.0;
};

struct ThreeTomographyOptions {
  double normalization_tolerance = 0.05;
  double conditioning_threshold = 1e-3;
};

struct ThreeAtomReconstruction {
  Canonicalized result;                // canonical state plus atom mapping
  std::array<double, 3> c_atom_order;  // amplitudes on atoms 1, 2, 3
  double phi2;                         // atom-order phases
  double phi3;
  double scale;
  double residual;
  double normalization_error;
  std::vector<std::string> warnings;
};

/// Products c_i c_j and phases from a linear harmonic fit (7+ samples) or multi-start
/// least squares (5-6 samples), then Levenberg-Marquardt refinement.
ThreeAtomReconstruction tomography_three(const std::vector<TorusSample>& samples,
                                         const ThreeTomographyOptions& options = {});

/// 3 x 3 torus grid over {0, 2pi/3, 4pi/3}^2.
std::vector<std::array<double, 2>> default_torus_design();

}  // namespace atomfringe
