#include "atomfringe/two_atom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "atomfringe/errors.hpp"
#include "optimize.hpp"
#include "parallel.hpp"

namespace atomfringe {

namespace {

constexpr double kPi = std::numbers::pi;

void check_u(double u) {
  if (!std::isfinite(u) || u <= 0.0) throw DomainError("separation u must be positive and finite");
}

TwoQubitBlochState state_on_sphere(double s, double theta, double phi) {
  const double st = std::sin(theta);
  return TwoQubitBlochState::from_vector(s * st * std::cos(phi), s * st * std::sin(phi),
                                         s * std::cos(theta));
}

struct Extremum {
  double x;
  double value;
};

// Refines a grid extremum at index i of `vals` (sign = +1 max, -1 min).
Extremum refine(const std::function<double(double)>& f, const std::vector<double>& xs,
                const std::vector<double>& vals, std::size_t i, double h, double sign,
                bool periodic) {
  const std::size_t n = xs.size();
  double lo, hi;
  if (periodic) {
    lo = xs[i] - h;
    hi = xs[i] + h;
  } else {
    lo = xs[i == 0 ? 0 : i - 1];
    hi = xs[i + 1 == n ? n - 1 : i + 1];
  }
  auto neg = [&](double x) { return -sign * f(x); };
  const double mid = (i == 0 || i + 1 == n) ? 0.5 * (lo + hi) : xs[i];
  auto r = detail::brent_minimize(neg, lo, mid, hi);
  const double v = -sign * r.fx;
  if (sign * v >= sign * vals[i]) return {r.x, v};
  return {xs[i], vals[i]};
}

}  // namespace

double PairCoupling::peak_separation_ratio_plus() const { return std::abs(g / (1.0 + f)); }
double PairCoupling::peak_separation_ratio_minus() const { return std::abs(g / (1.0 - f)); }

PairCoupling eigenmodes_two(double u) {
  check_u(u);
  const double f = std::sin(u) / u;
  const double g = std::cos(u) / u;
  return {u, f, g, -0.5 * g, 0.5 * g, 1.0 + f, 1.0 - f};
}

SpectrumWeights spectrum_weights_two(const TwoQubitBlochState& state, double u, double chi) {
  const PairCoupling pc = eigenmodes_two(u);
  const double sx = state.sx();
  const double q = (state.sy() - pc.g * state.sz()) / (1.0 + pc.g * pc.g);
  const double c = std::cos(chi), s = std::sin(chi);
  return {0.25 * ((1.0 + sx) * (1.0 + c) + (1.0 + pc.f) * q * s),
          0.25 * ((1.0 - sx) * (1.0 - c) + (1.0 - pc.f) * q * s)};
}

double lorentzian(double omega, double center, double width) {
  const double d = omega - center;
  return 1.0 / (d * d + 0.25 * width * width);
}

double emission_spectrum_two(const TwoQubitBlochState& state, double u, double omega, double chi,
                             const std::optional<AbsoluteUnits>& units) {
  const PairCoupling pc = eigenmodes_two(u);
  const SpectrumWeights w = spectrum_weights_two(state, u, chi);
  double p = w.b_plus * lorentzian(omega, pc.omega_plus, pc.gamma_plus) +
             w.b_minus * lorentzian(omega, pc.omega_minus, pc.gamma_minus);
  if (units) {
    const double k3 = units->k0 * units->k0 * units->k0;
    p *= (units->omega0 + omega) / (4.0 * kPi * kPi * k3);
  }
  return p;
}

double FringeParams::amplitude() const { return std::hypot(xi_minus, eta); }

double FringeParams::intensity(double chi) const {
  return 0.25 * (xi_plus + amplitude() * std::cos(chi - theta0));
}

FringeParams fringe_params_two(const TwoQubitBlochState& state, double u, double omega) {
  const PairCoupling pc = eigenmodes_two(u);
  const double lp = lorentzian(omega, pc.omega_plus, pc.gamma_plus);
  const double lm = lorentzian(omega, pc.omega_minus, pc.gamma_minus);
  const double sx = state.sx();
  FringeParams p{};
  p.xi_plus = (1.0 + sx) * lp + (1.0 - sx) * lm;
  p.xi_minus = (1.0 + sx) * lp - (1.0 - sx) * lm;
  p.eta = ((1.0 + pc.f) * lp + (1.0 - pc.f) * lm) * (state.sy() - pc.g * state.sz()) /
          (1.0 + pc.g * pc.g);
  p.theta0 = (p.xi_minus == 0.0 && p.eta == 0.0) ? 0.0 : std::atan2(p.eta, p.xi_minus);
  return p;
}

FringeProfile fringe_profile_two(const TwoQubitBlochState& state, double u, double omega,
                                 double chi_lo, double chi_hi, int n) {
  if (n < 2) throw DomainError("fringe profile needs at least 2 samples");
  if (!(chi_hi > chi_lo)) throw DomainError("fringe profile needs chi_hi > chi_lo");
  FringeProfile out{fringe_params_two(state, u, omega), {}, 0.0, 0.0};
  out.samples.reserve(static_cast<std::size_t>(n));
  out.imax = -HUGE_VAL;
  out.imin = HUGE_VAL;
  for (int i = 0; i < n; ++i) {
    const double chi = chi_lo + (chi_hi - chi_lo) * i / (n - 1);
    const double v = emission_spectrum_two(state, u, omega, chi);
    out.samples.emplace_back(chi, v);
    out.imax = std::max(out.imax, v);
    out.imin = std::min(out.imin, v);
  }
  return out;
}

double visibility_two(const TwoQubitBlochState& state, double u, double omega,
                      VisibilityMode mode) {
  const FringeParams p = fringe_params_two(state, u, omega);
  const double amp = p.amplitude();
  if (mode == VisibilityMode::formal || u >= kPi) return amp / p.xi_plus;

  // cos(chi - theta0) over chi in [-u, u]: endpoints plus interior stationary points.
  double cmax = std::max(std::cos(-u - p.theta0), std::cos(u - p.theta0));
  double cmin = std::min(std::cos(-u - p.theta0), std::cos(u - p.theta0));
  for (int k = -3; k <= 3; ++k) {
    const double chi = p.theta0 + k * kPi;
    if (chi >= -u && chi <= u) {
      const double c = (k % 2 == 0) ? 1.0 : -1.0;
      cmax = std::max(cmax, c);
      cmin = std::min(cmin, c);
    }
  }
  const double imax = p.xi_plus + amp * cmax;
  const double imin = p.xi_plus + amp * cmin;
  return (imax - imin) / (imax + imin);
}

double visibility_two_bruteforce(const TwoQubitBlochState& state, double u, double omega,
                                 int n_grid, VisibilityMode mode) {
  if (n_grid < 1000) throw DomainError("brute-force visibility needs n_grid >= 1000");
  check_u(u);
  const bool periodic = mode == VisibilityMode::formal;
  const double lo = periodic ? 0.0 : -u;
  const double span = periodic ? 2.0 * kPi : 2.0 * u;
  const double h = periodic ? span / n_grid : span / (n_grid - 1);

  auto f = [&](double chi) { return emission_spectrum_two(state, u, omega, chi); };
  std::vector<double> xs(static_cast<std::size_t>(n_grid)), vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = lo + h * static_cast<double>(i);
    vals[i] = f(xs[i]);
  }
  const auto imax = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  const auto imin = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  const double vmax = refine(f, xs, vals, imax, h, 1.0, periodic).value;
  const double vmin = refine(f, xs, vals, imin, h, -1.0, periodic).value;
  return (vmax - vmin) / (vmax + vmin);
}

double deviation_s0_analytic(double u) {
  return 2.0 * u * std::abs(std::sin(u)) / (1.0 + u * u);
}

DeviationResult deviation_max(double s, double u, double omega, const DeviationOptions& options) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("purity s must lie in [0,1]");
  check_u(u);
  if (options.grid < 4) throw DomainError("deviation grid must be at least 4");
  const int n = options.grid;

  auto dev = [&](double theta, double phi) {
    const auto st = state_on_sphere(s, theta, phi);
    return std::abs(visibility_two(st, u, omega, options.mode) - st.s() * std::sin(st.theta()));
  };

  struct Cand {
    double value;
    int i, j;
  };
  std::vector<Cand> grid;
  grid.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      grid.push_back({dev(kPi * i / (n - 1), 2.0 * kPi * j / n), i, j});
  const int k = std::clamp(options.refine_candidates, 1, n * n);
  std::partial_sort(grid.begin(), grid.begin() + k, grid.end(), [](const Cand& a, const Cand& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  DeviationResult best{grid[0].value, kPi * grid[0].i / (n - 1), 2.0 * kPi * grid[0].j / n};
  auto obj = [&](const Eigen::VectorXd& x) { return -dev(x(0), x(1)); };
  const Eigen::Vector2d step(kPi / (n - 1), 2.0 * kPi / n);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd x0(2);
    x0 << kPi * grid[c].i / (n - 1), 2.0 * kPi * grid[c].j / n;
    const auto r = detail::nelder_mead(obj, x0, step, 1e-10, 4000);
    if (-r.fx > best.max_dev) best = {-r.fx, r.x(0), r.x(1)};
  }
  const auto st = state_on_sphere(1.0, best.theta_star, best.phi_star);
  best.theta_star = st.theta();
  best.phi_star = st.phi();
  return best;
}

std::vector<DeviationRow> deviation_scan(const std::vector<double>& s_values,
                                         const std::vector<double>& u_values, double omega,
                                         const DeviationOptions& options, int threads) {
  std::vector<DeviationRow> rows(s_values.size() * u_values.size());
  detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const double s = s_values[idx / u_values.size()];
    const double u = u_values[idx % u_values.size()];
    rows[idx] = {u, s, deviation_max(s, u, omega, options), deviation_s0_analytic(u)};
  });
  return rows;
}

}  // namespace atomfringe
