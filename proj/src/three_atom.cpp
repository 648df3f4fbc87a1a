#include "atomfringe/three_atom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "atomfringe/errors.hpp"
#include "optimize.hpp"

namespace atomfringe {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

void check_u(double u) {
  if (!std::isfinite(u) || u <= 0.0) throw DomainError("separation u must be positive and finite");
}

}  // namespace

TriangleGeometry::TriangleGeometry(double u) : u_(u) { check_u(u); }

Eigen::Vector3d TriangleGeometry::position(int j) const {
  if (j < 0 || j > 2) throw DomainError("atom index must be 0, 1 or 2");
  const double t = 2.0 * kPi * j / 3.0;
  return (u_ / std::sqrt(3.0)) * Eigen::Vector3d(std::sin(t), -std::cos(t), 0.0);
}

Eigen::Vector3d TriangleGeometry::edge(int j) const {
  if (j < 0 || j > 2) throw DomainError("edge index must be 0, 1 or 2");
  const double t = 2.0 * kPi * j / 3.0;
  return u_ * Eigen::Vector3d(std::cos(t), std::sin(t), 0.0);
}

std::array<double, 3> TriangleGeometry::phases(const Eigen::Vector3d& khat) const {
  std::array<double, 3> th{};
  for (int i = 0; i < 3; ++i)
    th[static_cast<std::size_t>(i)] = khat.dot(position((i + 1) % 3) - position((i + 2) % 3));
  return th;
}

TriadCoupling eigenmodes_three(double u) {
  check_u(u);
  const double f = std::sin(u) / u;
  const double g = std::cos(u) / u;
  const double den = 9.0 * g * g + (2.0 + f) * (2.0 + f);
  TriadCoupling t{};
  t.u = u;
  t.f = f;
  t.g = g;
  t.omega_plus = -g;
  t.omega_minus = -0.5 * g;
  t.gamma_plus = 1.0 + 2.0 * f;
  t.gamma_minus = 1.0 - f;
  t.h_plus = (2.0 + f) * t.gamma_plus / den;
  t.h_minus = (2.0 + f) * t.gamma_minus / den;
  t.h_zero = 3.0 * g / den;
  return t;
}

TriadWeights spectrum_weights_three(const WLikeState& state, const TriangleGeometry& geom,
                                    const Eigen::Vector3d& khat) {
  if (state.has_phases())
    throw DomainError("the finite-distance spectrum is defined for real amplitudes only");
  const TriadCoupling t = eigenmodes_three(geom.u());
  const auto& c = state.c();
  const double cb = state.mean_amplitude();
  TriadWeights w{1.5 * cb * cb, 0.5 * (1.0 - 3.0 * cb * cb)};
  for (int i = 1; i < 3; ++i)
    for (int j = 0; j < i; ++j) {
      const double ph = khat.dot(geom.position(i) - geom.position(j));
      const double cs = std::cos(ph), sn = std::sin(ph);
      const double ci = c[static_cast<std::size_t>(i)], cj = c[static_cast<std::size_t>(j)];
      const double sym = ci + cj - 2.0 * cb;
      const double anti = cb * (ci - cj) * t.h_zero * sn;
      w.d_plus += cb * (cb + sym * t.h_plus) * cs + anti;
      w.d_minus += ((ci - cb) * (cj - cb) + cb * sym * t.h_minus) * cs + anti;
    }
  return w;
}

double emission_spectrum_three(const WLikeState& state, const TriangleGeometry& geom, double omega,
                               const Eigen::Vector3d& khat,
                               const std::optional<AbsoluteUnits>& units) {
  const TriadCoupling t = eigenmodes_three(geom.u());
  const TriadWeights w = spectrum_weights_three(state, geom, khat);
  double p = w.d_plus * lorentzian(omega, t.omega_plus, t.gamma_plus) +
             w.d_minus * lorentzian(omega, t.omega_minus, t.gamma_minus);
  if (units) {
    const double k3 = units->k0 * units->k0 * units->k0;
    p *= (units->omega0 + omega) / (4.0 * kPi * kPi * k3);
  }
  return p;
}

double farfield_emission_three(const WLikeState& state, const TriangleGeometry& geom,
                               double omega, const Eigen::Vector3d& khat) {
  const auto th = geom.phases(khat);
  return 0.5 * lorentzian(omega, 0.0, 1.0) * farfield_intensity(state, th[0], th[1]);
}

double farfield_intensity(const WLikeState& state, double theta1, double theta2) {
  const auto& c = state.c();
  const double theta3 = -theta1 - theta2;
  const double t1 = theta1 - state.phi2() + state.phi3();
  const double t2 = theta2 - state.phi3();
  const double t3 = theta3 + state.phi2();
  return 1.0 + 2.0 * (c[1] * c[2] * std::cos(t1) + c[2] * c[0] * std::cos(t2) +
                      c[0] * c[1] * std::cos(t3));
}

ThreeExtrema fringe_extrema_three(const WLikeState& state) {
  const auto& c = state.c();
  const double sum = c[0] + c[1] + c[2];
  ThreeExtrema e{sum * sum, 0.0, {0.0, kPi, kPi}};
  if (c[0] > c[1] + c[2]) {
    const double d = c[0] - c[1] - c[2];
    e.imin = d * d;
    e.angles = {0.0, kPi, -kPi};
    return e;
  }

  const double prod = 2.0 * c[0] * c[1] * c[2];
  std::array<double, 3> mag{};
  for (std::size_t j = 0; j < 3; ++j) {
    const double cj = c[j];
    const double cosj = (2.0 * cj * cj - 1.0) * cj / prod;
    if (std::abs(cosj) > 1.0 + 1e-12)
      throw InternalError("fringe extrema: minimizing cosine outside [-1,1]");
    mag[j] = std::acos(std::clamp(cosj, -1.0, 1.0));
  }
  // Lexicographically smallest sign pattern (- before +) closing the sum.
  double best_err = HUGE_VAL;
  for (int mask = 0; mask < 8; ++mask) {
    std::array<double, 3> a{};
    for (std::size_t j = 0; j < 3; ++j) a[j] = ((mask >> (2 - j)) & 1) ? mag[j] : -mag[j];
    const double err = std::abs(wrap_pi(a[0] + a[1] + a[2]));
    if (err < best_err - 1e-12) {
      best_err = err;
      e.angles = a;
    }
    if (err < 1e-9) break;
  }
  e.imin = 0.0;
  return e;
}

double visibility_three(const WLikeState& state) {
  const auto& c = state.c();
  if (c[0] <= c[1] + c[2]) return 1.0;
  return 2.0 * c[0] * (c[1] + c[2]) / (1.0 + 2.0 * c[1] * c[2]);
}

double visibility_three_bruteforce(const WLikeState& state, int n_grid) {
  if (n_grid < 256) throw DomainError("torus brute force needs n_grid >= 256 per axis");
  const double h = 2.0 * kPi / n_grid;

  struct Cell {
    double value;
    int i, j;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(n_grid) * static_cast<std::size_t>(n_grid));
  for (int i = 0; i < n_grid; ++i)
    for (int j = 0; j < n_grid; ++j)
      cells.push_back({farfield_intensity(state, i * h, j * h), i, j});

  auto order = [](const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  const int k = 4;
  std::vector<Cell> lo(cells.begin(), cells.end());
  std::partial_sort(lo.begin(), lo.begin() + k, lo.end(), order);
  std::vector<Cell> hi(cells.begin(), cells.end());
  std::partial_sort(hi.begin(), hi.begin() + k, hi.end(),
                    [&](const Cell& a, const Cell& b) { return order(b, a); });

  auto fmin = [&](const Eigen::VectorXd& x) { return farfield_intensity(state, x(0), x(1)); };
  auto fmax = [&](const Eigen::VectorXd& x) { return -farfield_intensity(state, x(0), x(1)); };
  const Eigen::Vector2d step(h, h);

  double imin = lo[0].value, imax = hi[0].value;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd x0(2);
    x0 << lo[static_cast<std::size_t>(c)].i * h, lo[static_cast<std::size_t>(c)].j * h;
    imin = std::min(imin, detail::nelder_mead(fmin, x0, step, 1e-12, 4000).fx);
    x0 << hi[static_cast<std::size_t>(c)].i * h, hi[static_cast<std::size_t>(c)].j * h;
    imax = std::max(imax, -detail::nelder_mead(fmax, x0, step, 1e-12, 4000).fx);
  }
  imin = std::max(imin, 0.0);
  return (imax - imin) / (imax + imin);
}

}  // namespace atomfringe
