#include "atomfringe/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "atomfringe/errors.hpp"
#include "atomfringe/two_atom.hpp"
#include "optimize.hpp"

namespace atomfringe {

namespace {

constexpr double kPi = std::numbers::pi;

double weight_of(double sigma) { return sigma > 0.0 ? 1.0 / sigma : 1.0; }

void check_sample(double intensity) {
  if (!std::isfinite(intensity) || intensity < 0.0)
    throw DomainError("fringe intensities must be finite and non-negative");
}

int numeric_rank(const Eigen::MatrixXd& a, double rel = 1e-9) {
  Eigen::MatrixXd scaled = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    if (n > 0.0) scaled.col(j) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * sv(0)) ++r;
  return r;
}

struct LinearFit {
  Eigen::VectorXd p;
  Eigen::MatrixXd cov;
  double rms;
};

// Weighted least squares; rows of `a` and `y` already multiplied by the weights.
LinearFit solve_weighted(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, bool have_sigma) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  LinearFit out;
  out.p = qr.solve(y);
  const Eigen::VectorXd r = a * out.p - y;
  const auto n = a.rows(), k = a.cols();
  out.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
  const Eigen::MatrixXd ata = a.transpose() * a;
  out.cov = ata.inverse();
  if (!have_sigma) {
    const double s2 = n > k ? r.squaredNorm() / static_cast<double>(n - k) : 0.0;
    out.cov *= s2;
  }
  return out;
}

struct TwoColumns {
  double k, x, y, z;
};

TwoColumns two_columns(const FringeSample& s) {
  const PairCoupling pc = eigenmodes_two(s.u);
  const double lp = lorentzian(s.omega, pc.omega_plus, pc.gamma_plus);
  const double lm = lorentzian(s.omega, pc.omega_minus, pc.gamma_minus);
  const double c = std::cos(s.chi), sn = std::sin(s.chi);
  const double y = 0.25 * sn * ((1.0 + pc.f) * lp + (1.0 - pc.f) * lm) / (1.0 + pc.g * pc.g);
  return {0.25 * ((1.0 + c) * lp + (1.0 - c) * lm), 0.25 * ((1.0 + c) * lp - (1.0 - c) * lm), y,
          -pc.g * y};
}

bool have_sigmas(const std::vector<FringeSample>& s) {
  return std::all_of(s.begin(), s.end(), [](const FringeSample& x) { return x.sigma > 0.0; });
}

Eigen::Vector3d project_ball(const Eigen::Vector3d& v, bool& projected) {
  const double n = v.norm();
  projected = n > 1.0;
  return projected ? Eigen::Vector3d(v / n) : v;
}

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

bool near_phase(double chi, double target) { return std::abs(wrap_pi(chi - target)) < 1e-9; }

}  // namespace

FringeFit fit_fringe_two(const std::vector<FringeSample>& samples) {
  if (samples.size() < 3) throw InsufficientData("fringe fit needs at least 3 samples");
  const double u = samples.front().u;
  std::set<double> phases;
  for (const auto& s : samples) {
    check_sample(s.intensity);
    if (s.u != u) throw DomainError("fringe fit expects a single separation");
    phases.insert(wrap_pi(s.chi));
  }
  if (phases.size() < 3) throw IllPosed("fringe fit needs at least 3 distinct phases");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double w = weight_of(s.sigma);
    const TwoColumns c = two_columns(s);
    a.row(i) << w * c.k, w * c.x, w * c.y;
    y(i) = w * s.intensity;
  }
  if (numeric_rank(a) < 3) throw IllPosed("fringe fit design is rank deficient");
  const LinearFit lf = solve_weighted(a, y, have_sigmas(samples));
  const double k = lf.p(0);
  if (!(k > 0.0)) throw IllPosed("fringe fit produced a non-positive scale");

  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  jac(0, 0) = 1.0;
  jac(1, 0) = -lf.p(1) / (k * k);
  jac(1, 1) = 1.0 / k;
  jac(2, 0) = -lf.p(2) / (k * k);
  jac(2, 2) = 1.0 / k;
  return {u, k, lf.p(1) / k, lf.p(2) / k, jac * lf.cov * jac.transpose(), lf.rms};
}

TwoAtomReconstruction tomography_two_exact(const std::vector<FringeSample>& samples) {
  if (samples.size() < 4) throw InsufficientData("exact fit needs at least 4 samples");
  std::set<double> gs;
  for (const auto& s : samples) {
    check_sample(s.intensity);
    gs.insert(eigenmodes_two(s.u).g);
  }

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    const double w = weight_of(s.sigma);
    const TwoColumns c = two_columns(s);
    a.row(i) << w * c.k, w * c.x, w * c.y, w * c.z;
    y(i) = w * s.intensity;
  }
  if (numeric_rank(a) < 4) {
    if (gs.size() < 2)
      throw IllPosed(
          "at a single separation sy and sz enter only through sy - g sz; add samples at a "
          "second separation");
    throw IllPosed("exact fit design is rank deficient");
  }
  const LinearFit lf = solve_weighted(a, y, have_sigmas(samples));
  const double k = lf.p(0);
  if (!(k > 0.0)) throw IllPosed("exact fit produced a non-positive scale");

  Eigen::Matrix<double, 3, 4> jac = Eigen::Matrix<double, 3, 4>::Zero();
  for (int i = 0; i < 3; ++i) {
    jac(i, 0) = -lf.p(i + 1) / (k * k);
    jac(i, i + 1) = 1.0 / k;
  }
  const Eigen::Vector3d raw = lf.p.tail<3>() / k;
  bool projected = false;
  const Eigen::Vector3d v = project_ball(raw, projected);
  return {TwoQubitBlochState::from_vector(v(0), v(1), v(2)), raw,
          jac * lf.cov * jac.transpose(), k, lf.rms, projected};
}

TwoAtomReconstruction combine_fringe_fits(const std::vector<FringeFit>& fits) {
  if (fits.empty()) throw InsufficientData("no fringe fits to combine");
  std::set<double> gs;
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const auto& f : fits) {
    const double g = eigenmodes_two(f.u).g;
    gs.insert(g);
    Eigen::Matrix<double, 2, 3> a;
    a << 1.0, 0.0, 0.0, 0.0, 1.0, -g;
    const Eigen::Matrix2d c = f.covariance.bottomRightCorner<2, 2>();
    if (!(c.determinant() > 0.0)) throw IllPosed("fringe fit covariance is singular");
    const Eigen::Matrix2d w = c.inverse();
    info += a.transpose() * w * a;
    rhs += a.transpose() * w * Eigen::Vector2d(f.sx, f.q);
  }
  if (gs.size() < 2)
    throw IllPosed(
        "at a single separation sy and sz enter only through sy - g sz; add fits at a second "
        "separation");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(info, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues()(0) <= 1e-12 * eig.eigenvalues()(2))
    throw IllPosed("combined fringe fits are rank deficient");
  const Eigen::Matrix3d cov = info.inverse();
  const Eigen::Vector3d raw = cov * rhs;
  double rss = 0.0, scale = 0.0;
  for (const auto& f : fits) {
    const double g = eigenmodes_two(f.u).g;
    const Eigen::Vector2d r(f.sx - raw(0), f.q - (raw(1) - g * raw(2)));
    rss += r.squaredNorm();
    scale += f.scale;
  }
  bool projected = false;
  const Eigen::Vector3d v = project_ball(raw, projected);
  return {TwoQubitBlochState::from_vector(v(0), v(1), v(2)), raw, cov,
          scale / static_cast<double>(fits.size()),
          std::sqrt(rss / (2.0 * static_cast<double>(fits.size()))), projected};
}

double firstorder_fringe(const TwoQubitBlochState& state, double u, double chi) {
  const PairCoupling pc = eigenmodes_two(u);
  const double sx = state.sx();
  return 1.0 - 2.0 * pc.f * sx + (sx - 2.0 * pc.f) * std::cos(chi) +
         (state.sy() - pc.g * state.sz()) * std::sin(chi);
}

double firstorder_theta0(const TwoQubitBlochState& state, double u) {
  const PairCoupling pc = eigenmodes_two(u);
  const double sx = state.sx();
  if (sx == 0.0) throw IllPosed("first-order phase shift is singular at sx = 0");
  return std::atan((state.sy() - pc.g * state.sz()) / sx + 2.0 * pc.f * state.sy() / (sx * sx));
}

FirstOrderInput firstorder_input(const std::vector<FringeSample>& samples, double theta0) {
  double v[4] = {0.0, 0.0, 0.0, 0.0};
  bool found[4] = {false, false, false, false};
  const double targets[4] = {0.0, kPi, 0.5 * kPi, -0.5 * kPi};
  for (const auto& s : samples) {
    check_sample(s.intensity);
    for (int k = 0; k < 4; ++k)
      if (!found[k] && near_phase(s.chi, targets[k])) {
        v[k] = s.intensity;
        found[k] = true;
      }
  }
  for (bool f : found)
    if (!f) throw InsufficientData("first-order scheme needs samples at chi = 0, pi, +pi/2, -pi/2");
  return {v[0], v[1], v[2], v[3], theta0};
}

FirstOrderReconstruction tomography_two_firstorder(const FirstOrderInput& in, double u) {
  for (double p : {in.p0, in.p_pi, in.p_plus, in.p_minus}) check_sample(p);
  const PairCoupling pc = eigenmodes_two(u);
  const double f = pc.f, g = pc.g;
  if (std::abs(f) < 1e-12)
    throw IllPosed("first-order scheme divides by f, which vanishes at this separation");
  if (std::abs(g) < 1e-12)
    throw IllPosed("first-order scheme divides by g, which vanishes at this separation");

  const double tot = in.p0 + in.p_pi;
  if (!(tot > 0.0)) throw IllPosed("first-order scheme needs non-zero intensity");
  const double r = (in.p0 - in.p_pi) / tot;
  const double sx = (r + 2.0 * f) / (1.0 + 2.0 * f * r);
  if (std::abs(sx) < 1e-12)
    throw IllPosed("first-order phase relation is singular at sx = 0; use the exact fit");
  const double amp = tot / (2.0 * (1.0 - 2.0 * f * sx));
  const double q = (in.p_plus - in.p_minus) / (2.0 * amp);
  const double sy = (std::tan(in.theta0) - q / sx) * sx * sx / (2.0 * f);
  const double sz = (sy - q) / g;

  const Eigen::Vector3d raw(sx, sy, sz);
  bool projected = false;
  const Eigen::Vector3d v = project_ball(raw, projected);
  const double m = std::max(std::abs(f), std::abs(g));
  return {TwoQubitBlochState::from_vector(v(0), v(1), v(2)), raw, m * m, projected};
}

std::vector<std::array<double, 2>> default_torus_design() {
  std::vector<std::array<double, 2>> d;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d.push_back({2.0 * kPi * i / 3.0, 2.0 * kPi * j / 3.0});
  return d;
}

namespace {

// x = (w1, w2, w3, phi2, phi3); intensity = |w|^2-scaled pattern.
double torus_model(const Eigen::VectorXd& x, double t1, double t2) {
  const double t3 = -t1 - t2;
  const double h1 = t1 - x(3) + x(4), h2 = t2 - x(4), h3 = t3 + x(3);
  return x(0) * x(0) + x(1) * x(1) + x(2) * x(2) +
         2.0 * (x(1) * x(2) * std::cos(h1) + x(2) * x(0) * std::cos(h2) +
                x(0) * x(1) * std::cos(h3));
}

Eigen::MatrixXd torus_jacobian(const std::vector<TorusSample>& s, const Eigen::VectorXd& x) {
  Eigen::MatrixXd j(static_cast<Eigen::Index>(s.size()), 5);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (int k = 0; k < 5; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      j(static_cast<Eigen::Index>(i), k) =
          weight_of(s[i].sigma) *
          (torus_model(xp, s[i].theta1, s[i].theta2) - torus_model(xm, s[i].theta1, s[i].theta2)) /
          (2.0 * h);
    }
  return j;
}

}  // namespace

ThreeAtomReconstruction tomography_three(const std::vector<TorusSample>& samples,
                                         const ThreeTomographyOptions& options) {
  if (samples.size() < 5) throw InsufficientData("three-atom tomography needs at least 5 samples");
  for (const auto& s : samples) check_sample(s.intensity);
  const auto n = static_cast<Eigen::Index>(samples.size());
  std::vector<std::string> warnings;
  double norm_err = 0.0;

  auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = samples[static_cast<std::size_t>(i)];
      r(i) = weight_of(s.sigma) * (torus_model(x, s.theta1, s.theta2) - s.intensity);
    }
  };

  Eigen::VectorXd x0(5);
  bool have_start = false;
  if (n >= 7) {
    Eigen::MatrixXd a(n, 7);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = samples[static_cast<std::size_t>(i)];
      const double w = weight_of(s.sigma);
      const double t3 = -s.theta1 - s.theta2;
      a.row(i) << w, w * std::cos(s.theta1), w * std::sin(s.theta1), w * std::cos(s.theta2),
          w * std::sin(s.theta2), w * std::cos(t3), w * std::sin(t3);
      y(i) = w * s.intensity;
    }
    if (numeric_rank(a) == 7) {
      const Eigen::VectorXd p = solve_weighted(a, y, false).p;
      const double amp = p(0);
      if (!(amp > 0.0)) throw IllPosed("three-atom fit produced a non-positive scale");
      std::array<double, 3> prod{}, delta{};
      for (int i = 0; i < 3; ++i) {
        const double al = p(1 + 2 * i), be = p(2 + 2 * i);
        prod[static_cast<std::size_t>(i)] = std::hypot(al, be) / (2.0 * amp);
        delta[static_cast<std::size_t>(i)] = std::atan2(-be, al);
      }
      for (double pr : prod)
        if (!(pr > 1e-12)) throw IllPosed("a pair product c_i c_j vanished; state is infeasible");
      const double c1 = std::sqrt(prod[1] * prod[2] / prod[0]);
      const double c2 = std::sqrt(prod[2] * prod[0] / prod[1]);
      const double c3 = std::sqrt(prod[0] * prod[1] / prod[2]);
      norm_err = std::abs(c1 * c1 + c2 * c2 + c3 * c3 - 1.0);
      if (norm_err > options.normalization_tolerance)
        throw IllPosed("reconstructed amplitudes violate normalization by " +
                       std::to_string(norm_err));
      const double closure = std::abs(wrap_pi(delta[0] + delta[1] + delta[2]));
      if (closure > 0.1) warnings.push_back("phase shifts do not sum to zero");
      const double sa = std::sqrt(amp);
      x0 << sa * c1, sa * c2, sa * c3, delta[2], -delta[1];
      have_start = true;
    }
  }

  if (!have_start) {
    std::mt19937_64 rng(0x7a3e5u);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    double mean_i = 0.0;
    for (const auto& s : samples) mean_i += s.intensity;
    mean_i /= static_cast<double>(n);
    double best = HUGE_VAL;
    Eigen::VectorXd r(n);
    for (int start = 0; start < 256; ++start) {
      Eigen::Vector3d c(std::abs(gauss(rng)), std::abs(gauss(rng)), std::abs(gauss(rng)));
      c.normalize();
      Eigen::VectorXd x(5);
      x << c(0), c(1), c(2), ang(rng), ang(rng);
      double mm = 0.0;
      for (const auto& s : samples) mm += torus_model(x, s.theta1, s.theta2);
      mm /= static_cast<double>(n);
      if (mm > 0.0) x.head<3>() *= std::sqrt(mean_i / mm);
      const auto fit = detail::levenberg_marquardt(residuals, static_cast<int>(n), x, 1e-12, 200);
      if (fit.chi2 < best) {
        best = fit.chi2;
        x0 = fit.x;
      }
    }
  }

  const auto fit = detail::levenberg_marquardt(residuals, static_cast<int>(n), x0, 1e-15, 500);
  Eigen::VectorXd x = fit.x;
  if (numeric_rank(torus_jacobian(samples, x), 1e-7) < 5)
    throw IllPosed("sample design does not determine amplitudes and phases");

  Eigen::Vector3d w(std::abs(x(0)), std::abs(x(1)), std::abs(x(2)));
  // A negative w_j is a pi shift of that atom's phase.
  double ph2 = x(3) + (x(1) < 0.0 ? kPi : 0.0) - (x(0) < 0.0 ? kPi : 0.0);
  double ph3 = x(4) + (x(2) < 0.0 ? kPi : 0.0) - (x(0) < 0.0 ? kPi : 0.0);
  const double scale = w.squaredNorm();
  const Eigen::Vector3d c = w / std::sqrt(scale);
  if (c.minCoeff() <= 0.0) throw IllPosed("a reconstructed amplitude vanished");
  if (c.minCoeff() < options.conditioning_threshold)
    warnings.push_back("smallest amplitude is near zero; reconstruction is ill-conditioned");

  const double phi2 = wrap_pi(ph2), phi3 = wrap_pi(ph3);
  const std::array<cdouble, 3> amps{cdouble(c(0), 0.0), std::polar(c(1), phi2),
                                    std::polar(c(2), phi3)};
  return {canonicalize(amps),
          {c(0), c(1), c(2)},
          phi2,
          phi3,
          scale,
          std::sqrt(fit.chi2 / static_cast<double>(n)),
          norm_err,
          std::move(warnings)};
}

}  // namespace atomfringe
