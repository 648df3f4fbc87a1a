#include "atomfringe/photon_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "atomfringe/errors.hpp"
#include "optimize.hpp"
#include "parallel.hpp"

namespace atomfringe {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 chunk_rng(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

Eigen::Vector3d random_direction(std::mt19937_64& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double ph = 2.0 * kPi * uniform01(rng);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(ph), r * std::sin(ph), z};
}

struct TruncatedCauchy {
  double center, half, a, b;

  TruncatedCauchy(double c, double width, double lo, double hi)
      : center(c), half(0.5 * width), a(std::atan((lo - c) / half)), b(std::atan((hi - c) / half)) {}

  double norm() const { return (b - a) / half; }
  double draw(std::mt19937_64& rng) const {
    return center + half * std::tan(a + uniform01(rng) * (b - a));
  }
};

// Density W+(d) L+(omega) + W-(d) L-(omega) with bounds W+- <= wmax.
struct LineModel {
  std::function<std::array<double, 2>(const Eigen::Vector3d&)> weights;
  std::array<double, 2> center;
  std::array<double, 2> width;
  std::array<double, 2> wmax;
  double filtered_max = 0.0;  // exact envelope at the filtered detuning, if known
};

class Sampler {
 public:
  Sampler(LineModel m, const SimOptions& o) : m_(std::move(m)), o_(o) {
    if (o_.mode == OmegaMode::filtered) {
      lp_ = lorentzian(o_.omega, m_.center[0], m_.width[0]);
      lm_ = lorentzian(o_.omega, m_.center[1], m_.width[1]);
      env_ = m_.filtered_max > 0.0 ? m_.filtered_max : m_.wmax[0] * lp_ + m_.wmax[1] * lm_;
      if (!(env_ > 0.0)) throw InternalError("photon sampler: zero emission envelope");
    } else {
      const auto w = spectral_window(m_.center[0], m_.center[1], o_.window);
      lines_ = {TruncatedCauchy(m_.center[0], m_.width[0], w[0], w[1]),
                TruncatedCauchy(m_.center[1], m_.width[1], w[0], w[1])};
      z_ = {lines_[0].norm(), lines_[1].norm()};
      big_m_ = 2.0 * std::max(m_.wmax[0] * z_[0], m_.wmax[1] * z_[1]);
      if (!(big_m_ > 0.0)) throw InternalError("photon sampler: zero emission envelope");
    }
  }

  PhotonSample draw(std::mt19937_64& rng) const {
    for (;;) {
      if (o_.mode == OmegaMode::filtered) {
        const Eigen::Vector3d d = random_direction(rng);
        const auto w = m_.weights(d);
        const double p = w[0] * lp_ + w[1] * lm_;
        check(p, env_);
        if (uniform01(rng) * env_ < p) return {o_.omega, d};
      } else {
        const int k = uniform01(rng) < 0.5 ? 0 : 1;
        const double om = lines_[static_cast<std::size_t>(k)].draw(rng);
        const Eigen::Vector3d d = random_direction(rng);
        const double l0 = lorentzian(om, m_.center[0], m_.width[0]);
        const double l1 = lorentzian(om, m_.center[1], m_.width[1]);
        const auto w = m_.weights(d);
        const double p = w[0] * l0 + w[1] * l1;
        const double q = 0.5 * (l0 / z_[0] + l1 / z_[1]);
        check(p, big_m_ * q);
        if (uniform01(rng) * big_m_ * q < p) return {om, d};
      }
    }
  }

 private:
  static void check(double p, double env) {
    if (p < -1e-12 * env) throw InternalError("photon sampler: negative emission density");
    if (p > env * (1.0 + 1e-10)) throw InternalError("photon sampler: density exceeds envelope");
  }

  LineModel m_;
  SimOptions o_;
  double lp_ = 0.0, lm_ = 0.0, env_ = 0.0, big_m_ = 0.0;
  std::array<TruncatedCauchy, 2> lines_{TruncatedCauchy(0, 1, -1, 1), TruncatedCauchy(0, 1, -1, 1)};
  std::array<double, 2> z_{};
};

LineModel two_atom_model(const TwoQubitBlochState& state, double u, const SimOptions& o) {
  const PairCoupling pc = eigenmodes_two(u);
  const double sx = state.sx();
  const double q = (state.sy() - pc.g * state.sz()) / (1.0 + pc.g * pc.g);
  const double f = pc.f;
  LineModel m;
  m.weights = [=](const Eigen::Vector3d& d) {
    const double chi = u * d.z();
    const double c = std::cos(chi), s = std::sin(chi);
    return std::array<double, 2>{0.25 * ((1.0 + sx) * (1.0 + c) + (1.0 + f) * q * s),
                                 0.25 * ((1.0 - sx) * (1.0 - c) + (1.0 - f) * q * s)};
  };
  m.center = {pc.omega_plus, pc.omega_minus};
  m.width = {pc.gamma_plus, pc.gamma_minus};
  const double ap = 1.0 + sx, am = 1.0 - sx;
  m.wmax = {0.25 * (ap + std::hypot(ap, (1.0 + f) * q)), 0.25 * (am + std::hypot(am, (1.0 - f) * q))};
  if (o.mode == OmegaMode::filtered) {
    const FringeParams fp = fringe_params_two(state, u, o.omega);
    m.filtered_max = 0.25 * (fp.xi_plus + fp.amplitude());
  }
  return m;
}

LineModel three_atom_model(const WLikeState& state, const TriangleGeometry& geom) {
  if (state.has_phases())
    throw DomainError("three-atom sampling needs a state without phases");
  const TriadCoupling t = eigenmodes_three(geom.u());
  const auto& c = state.c();
  const double cb = state.mean_amplitude();
  struct Pair {
    Eigen::Vector3d dx;
    double ap, am, b;
  };
  std::vector<Pair> pairs;
  double d0p = 1.5 * cb * cb, d0m = 0.5 * (1.0 - 3.0 * cb * cb);
  double bp = d0p, bm = d0m;
  for (int i = 1; i < 3; ++i)
    for (int j = 0; j < i; ++j) {
      const double ci = c[static_cast<std::size_t>(i)], cj = c[static_cast<std::size_t>(j)];
      const double sym = ci + cj - 2.0 * cb;
      Pair p{geom.position(i) - geom.position(j), cb * (cb + sym * t.h_plus),
             (ci - cb) * (cj - cb) + cb * sym * t.h_minus, cb * (ci - cj) * t.h_zero};
      bp += std::hypot(p.ap, p.b);
      bm += std::hypot(p.am, p.b);
      pairs.push_back(p);
    }
  LineModel m;
  m.weights = [pairs, d0p, d0m](const Eigen::Vector3d& d) {
    double wp = d0p, wm = d0m;
    for (const auto& p : pairs) {
      const double ph = d.dot(p.dx);
      const double cs = std::cos(ph), sn = std::sin(ph);
      wp += p.ap * cs + p.b * sn;
      wm += p.am * cs + p.b * sn;
    }
    return std::array<double, 2>{wp, wm};
  };
  m.center = {t.omega_plus, t.omega_minus};
  m.width = {t.gamma_plus, t.gamma_minus};
  m.wmax = {std::max(bp, 0.0), std::max(bm, 0.0)};
  return m;
}

std::vector<PhotonSample> run(const LineModel& model, std::size_t n, std::uint64_t seed,
                              const SimOptions& o) {
  if (o.chunk == 0) throw DomainError("chunk size must be positive");
  std::vector<PhotonSample> out(n);
  if (n == 0) return out;
  const Sampler sampler(model, o);
  const std::size_t chunks = (n + o.chunk - 1) / o.chunk;
  detail::parallel_for(chunks, o.threads, [&](std::size_t k) {
    auto rng = chunk_rng(seed, k);
    const std::size_t end = std::min(n, (k + 1) * o.chunk);
    for (std::size_t i = k * o.chunk; i < end; ++i) out[i] = sampler.draw(rng);
  });
  return out;
}

double fit_extrema_visibility(const Eigen::Vector3d& coef, double lo, double hi) {
  const double r = std::hypot(coef(1), coef(2));
  const double th = std::atan2(coef(2), coef(1));
  double cmax, cmin;
  if (hi - lo >= 2.0 * kPi) {
    cmax = 1.0;
    cmin = -1.0;
  } else {
    cmax = std::max(std::cos(lo - th), std::cos(hi - th));
    cmin = std::min(std::cos(lo - th), std::cos(hi - th));
    const double k0 = std::ceil((lo - th) / kPi);
    for (double k = k0; th + k * kPi <= hi; k += 1.0) {
      const double v = std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0;
      cmax = std::max(cmax, v);
      cmin = std::min(cmin, v);
    }
  }
  const double imax = coef(0) + r * cmax;
  const double imin = std::max(0.0, coef(0) + r * cmin);
  return (imax - imin) / (imax + imin);
}

struct HarmonicDesign {
  Eigen::MatrixXd x;
  Eigen::MatrixXd pinv;
};

HarmonicDesign harmonic_design(const FringeHistogram& h) {
  const auto b = static_cast<Eigen::Index>(h.bins());
  Eigen::MatrixXd x(b, 3);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double lo = h.edges[static_cast<std::size_t>(i)];
    const double hi = h.edges[static_cast<std::size_t>(i) + 1];
    const double w = hi - lo;
    x.row(i) << 1.0, (std::sin(hi) - std::sin(lo)) / w, (std::cos(lo) - std::cos(hi)) / w;
  }
  return {x, x.completeOrthogonalDecomposition().pseudoInverse()};
}

Eigen::Vector3d harmonic_fit(const HarmonicDesign& d, const FringeHistogram& h,
                             const std::vector<std::uint64_t>& counts, std::uint64_t total) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    y(static_cast<Eigen::Index>(i)) =
        static_cast<double>(counts[i]) / (static_cast<double>(total) * h.width(i));
  return d.pinv * y;
}

}  // namespace

std::array<double, 2> spectral_window(double a, double b, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("spectral window half-width must be positive");
  return {std::min(a, b) - half_width, std::max(a, b) + half_width};
}

std::vector<PhotonSample> sample_photons_two(const TwoQubitBlochState& state, double u,
                                             std::size_t n, std::uint64_t seed,
                                             const SimOptions& options) {
  return run(two_atom_model(state, u, options), n, seed, options);
}

std::vector<PhotonSample> sample_photons_three(const WLikeState& state,
                                               const TriangleGeometry& geom, std::size_t n,
                                               std::uint64_t seed, const SimOptions& options) {
  return run(three_atom_model(state, geom), n, seed, options);
}

double FringeHistogram::intensity(std::size_t i) const {
  return total == 0 ? 0.0 : static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
}

double FringeHistogram::stderr_of(std::size_t i) const {
  return total == 0 ? 0.0
                    : std::sqrt(static_cast<double>(counts[i])) /
                          (static_cast<double>(total) * width(i));
}

FringeHistogram make_histogram(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw DomainError("histogram needs bins > 0 and hi > lo");
  FringeHistogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  return h;
}

void fill(FringeHistogram& h, double x) {
  const double lo = h.edges.front(), hi = h.edges.back();
  if (x < lo || x > hi) return;
  auto i = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(h.bins()));
  i = std::min(i, h.bins() - 1);
  ++h.counts[i];
  ++h.total;
}

FringeHistogram simulate_fringe_two(const TwoQubitBlochState& state, double u, std::size_t n,
                                    std::uint64_t seed, std::size_t bins,
                                    const SimOptions& options) {
  if (options.chunk == 0) throw DomainError("chunk size must be positive");
  FringeHistogram h = make_histogram(-u, u, bins);
  if (n == 0) return h;
  const Sampler sampler(two_atom_model(state, u, options), options);
  const std::size_t chunks = (n + options.chunk - 1) / options.chunk;
  std::vector<FringeHistogram> parts(chunks, h);
  detail::parallel_for(chunks, options.threads, [&](std::size_t k) {
    auto rng = chunk_rng(seed, k);
    const std::size_t m = std::min(n, (k + 1) * options.chunk) - k * options.chunk;
    for (std::size_t i = 0; i < m; ++i) fill(parts[k], u * sampler.draw(rng).direction.z());
  });
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < bins; ++i) h.counts[i] += p.counts[i];
    h.total += p.total;
  }
  return h;
}

std::vector<double> fringe_bin_probabilities_two(const TwoQubitBlochState& state, double u,
                                                 double omega, const FringeHistogram& h) {
  const FringeParams fp = fringe_params_two(state, u, omega);
  const double r = fp.amplitude();
  std::vector<double> p(h.bins());
  double sum = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double a = h.edges[i], b = h.edges[i + 1];
    p[i] = fp.xi_plus * (b - a) + r * (std::sin(b - fp.theta0) - std::sin(a - fp.theta0));
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

VisibilityEstimate estimate_visibility(const FringeHistogram& h, const EstimateOptions& options) {
  if (h.total == 0) throw InsufficientData("visibility estimate: empty histogram");
  if (h.bins() < 32) throw InsufficientData("visibility estimate needs at least 32 bins");
  if (h.total < 100) throw InsufficientData("visibility estimate needs at least 100 counts");
  const double lo = h.edges.front(), hi = h.edges.back();
  const HarmonicDesign d = harmonic_design(h);
  const Eigen::Vector3d coef = harmonic_fit(d, h, h.counts, h.total);
  const double v = fit_extrema_visibility(coef, lo, hi);

  std::mt19937_64 rng(options.seed);
  std::vector<double> boot;
  boot.reserve(static_cast<std::size_t>(std::max(options.bootstrap, 0)));
  std::vector<std::uint64_t> resampled(h.bins());
  for (int b = 0; b < options.bootstrap; ++b) {
    long long remaining = static_cast<long long>(h.total);
    double mass = 1.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
      const double p = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
      long long k = 0;
      if (i + 1 == h.bins()) {
        k = remaining;
      } else if (remaining > 0 && p > 0.0) {
        std::binomial_distribution<long long> bin(remaining, std::min(1.0, p / mass));
        k = bin(rng);
      }
      resampled[i] = static_cast<std::uint64_t>(k);
      remaining -= k;
      mass -= p;
      if (mass <= 0.0) mass = 1e-300;
    }
    boot.push_back(fit_extrema_visibility(harmonic_fit(d, h, resampled, h.total), lo, hi));
  }
  double sigma = 0.0;
  if (boot.size() > 1) {
    double mean = 0.0;
    for (double x : boot) mean += x;
    mean /= static_cast<double>(boot.size());
    for (double x : boot) sigma += (x - mean) * (x - mean);
    sigma = std::sqrt(sigma / static_cast<double>(boot.size() - 1));
  }
  return {v, sigma, std::hypot(coef(1), coef(2)), std::atan2(coef(2), coef(1)), coef(0)};
}

GoodnessOfFit chi_square_gof(const std::vector<std::uint64_t>& counts,
                             const std::vector<double>& probabilities, double min_expected,
                             int fitted_parameters) {
  if (counts.size() != probabilities.size() || counts.empty())
    throw DomainError("goodness of fit: counts and probabilities differ in length");
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) throw InsufficientData("goodness of fit: no counts");

  std::vector<std::pair<double, double>> groups;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs += static_cast<double>(counts[i]);
    exp += n * probabilities[i];
    if (exp >= min_expected) {
      groups.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (groups.empty()) {
      groups.emplace_back(obs, exp);
    } else {
      groups.back().first += obs;
      groups.back().second += exp;
    }
  }
  double chi2 = 0.0;
  for (const auto& [o, e] : groups) {
    if (e <= 0.0) {
      if (o > 0.0) return {HUGE_VAL, 1, 0.0};
      continue;
    }
    chi2 += (o - e) * (o - e) / e;
  }
  const int dof = static_cast<int>(groups.size()) - 1 - fitted_parameters;
  if (dof < 1) throw InsufficientData("goodness of fit: too few populated bins");
  return {chi2, dof, detail::chi2_sf(chi2, dof)};
}

}  // namespace atomfringe
