#pragma once

// Thin wrappers over the GSL minimizers used across the library.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace atomfringe::detail {

using ObjectiveN = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx;
  bool converged;
  int iterations;
};

/// Simplex minimization (gsl nmsimplex2). Converges when the simplex size drops below size_tol.
NelderMeadResult nelder_mead(const ObjectiveN& f, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& step, double size_tol = 1e-10,
                             int max_iter = 5000);

struct BrentResult {
  double x;
  double fx;
  bool converged;
};

/// Minimize f on [a, b] starting from an interior guess m with f(m) < f(a), f(b).
/// Falls back to golden-section when the bracket is not valid.
BrentResult brent_minimize(const std::function<double(double)>& f, double a, double m, double b,
                           double xtol = 1e-13, int max_iter = 200);

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::MatrixXd covariance;  // (J^T J)^{-1}, unscaled
  double chi2;
  bool converged;
};

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

/// Levenberg-Marquardt with finite-difference Jacobian (gsl multifit_nlinear).
LeastSquaresResult levenberg_marquardt(const ResidualFn& residuals, int n_residuals,
                                       const Eigen::VectorXd& x0, double xtol = 1e-14,
                                       int max_iter = 500);

/// Upper tail probability of the chi-square distribution.
double chi2_sf(double x, double dof);

}  // namespace atomfringe::detail
