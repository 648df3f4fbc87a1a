#include "atomfringe/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "atomfringe/errors.hpp"
#include "atomfringe/measures.hpp"
#include "atomfringe/three_atom.hpp"

namespace atomfringe {

namespace {

double upsilon_of(double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw DomainError("visibility must lie in [0,1]");
  return std::sqrt(std::max(0.0, 1.0 - v * v));
}

BoundInterval make(Measure m, double v, double lower, double upper, bool lc, bool uc, Attainer la,
                   Attainer ua) {
  return {m, v, upsilon_of(v), lower, upper, lc, uc, la, ua};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string to_string(Measure m) {
  switch (m) {
    case Measure::mixedness: return "mixedness";
    case Measure::geometric: return "geometric";
    case Measure::negativity_max: return "negativity_max";
    case Measure::three_pi: return "three_pi";
  }
  return "unknown";
}

std::string to_string(Attainer a) {
  switch (a) {
    case Attainer::w_state: return "w_state";
    case Attainer::c2_eq_c3_family: return "c2_eq_c3_family";
    case Attainer::c3_to_zero_family: return "c3_to_zero_family";
    case Attainer::c1_boundary_family: return "c1_boundary_family";
    case Attainer::none: return "none";
  }
  return "unknown";
}

bool BoundInterval::contains(double value, double tol) const {
  if (lower_closed ? value < lower - tol : value <= lower - tol) return false;
  if (upper_closed ? value > upper + tol : value >= upper + tol) return false;
  return true;
}

namespace {

// Branch for V < 1 written in terms of u = sqrt(1 - V^2); u = 0 gives the V -> 1- limit.
BoundInterval below_one(Measure m, double v, double u) {
  switch (m) {
    case Measure::mixedness:
      return make(m, v, 2.0 / 3.0 * (1.0 - 8.0 * u * (1.0 + u) / ((3.0 + u) * (3.0 + u))),
                  2.0 * v * v / 3.0, true, false, Attainer::c2_eq_c3_family,
                  Attainer::c3_to_zero_family);
    case Measure::geometric:
      return make(m, v, (1.0 - u) / (3.0 + u), 0.5 * (1.0 - u), true, false,
                  Attainer::c2_eq_c3_family, Attainer::c3_to_zero_family);
    case Measure::negativity_max: {
      const double r = (1.0 + 3.0 * u) / (3.0 + u);
      return make(m, v, std::sqrt(std::max(0.0, 1.0 - r * r)), v, true, false,
                  Attainer::c2_eq_c3_family, Attainer::c3_to_zero_family);
    }
    case Measure::three_pi: {
      const double a = 4.0 * (1.0 + u) * std::sqrt(5.0 + 6.0 * u + 5.0 * u * u);
      const double b = (1.0 - u) * std::sqrt((1.0 - u) * (17.0 + 15.0 * u));
      const double c = 9.0 + 14.0 * u + 9.0 * u * u;
      return make(m, v, 0.0, 2.0 / (3.0 * (3.0 + u) * (3.0 + u)) * (a + b - c), false, true,
                  Attainer::c3_to_zero_family, Attainer::c2_eq_c3_family);
    }
  }
  throw DomainError("unknown measure");
}

}  // namespace

BoundInterval mixedness_bounds(double v) {
  const double u = upsilon_of(v);
  if (v == 1.0)
    return make(Measure::mixedness, v, 2.0 / 3.0, 8.0 / 9.0, true, true,
                Attainer::c1_boundary_family, Attainer::w_state);
  return below_one(Measure::mixedness, v, u);
}

BoundInterval geometric_bounds(double v) {
  const double u = upsilon_of(v);
  if (v == 1.0)
    return make(Measure::geometric, v, 1.0 / 3.0, 5.0 / 9.0, true, true,
                Attainer::c1_boundary_family, Attainer::w_state);
  return below_one(Measure::geometric, v, u);
}

BoundInterval negativity_bounds(double v) {
  const double u = upsilon_of(v);
  if (v == 1.0)
    return make(Measure::negativity_max, v, 2.0 * std::sqrt(2.0) / 3.0, 1.0, true, true,
                Attainer::w_state, Attainer::c2_eq_c3_family);
  return below_one(Measure::negativity_max, v, u);
}

BoundInterval three_pi_bounds(double v) {
  const double u = upsilon_of(v);
  if (v == 1.0)
    return make(Measure::three_pi, v, 0.0, 4.0 * (std::sqrt(5.0) - 1.0) / 9.0, false, true,
                Attainer::c3_to_zero_family, Attainer::w_state);
  return below_one(Measure::three_pi, v, u);
}

BoundInterval left_limit_at_unit_visibility(Measure m) { return below_one(m, 1.0, 0.0); }

BoundInterval bounds_for(Measure m, double v) {
  switch (m) {
    case Measure::mixedness: return mixedness_bounds(v);
    case Measure::geometric: return geometric_bounds(v);
    case Measure::negativity_max: return negativity_bounds(v);
    case Measure::three_pi: return three_pi_bounds(v);
  }
  throw DomainError("unknown measure");
}

double measure_value(Measure m, const WLikeState& s) {
  switch (m) {
    case Measure::mixedness: return mixedness(s);
    case Measure::geometric: return geometric_measure_wlike(s);
    case Measure::negativity_max: return negativity_max(s);
    case Measure::three_pi: return three_pi(s);
  }
  throw DomainError("unknown measure");
}

std::optional<WLikeState> sample_family(double v, double t) {
  upsilon_of(v);
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("family ratio must lie in (0,1]");
  if (v == 0.0) return std::nullopt;
  const double amax = 1.0 / std::sqrt((1.0 + t) * (1.0 + t) + 1.0 + t * t);
  auto vis = [t](double a) {
    const double c1 = std::sqrt(std::max(0.0, 1.0 - a * a * (1.0 + t * t)));
    const double c2 = a, c3 = t * a;
    if (c1 <= c2 + c3) return 1.0;
    return 2.0 * c1 * (c2 + c3) / (1.0 + 2.0 * c2 * c3);
  };
  auto build = [t](double a) {
    const double c1 = std::sqrt(1.0 - a * a * (1.0 + t * t));
    return WLikeState(c1, a, t * a);
  };
  if (v == 1.0) return build(amax);

  double lo = 0.0, hi = amax;
  while (hi - lo > 1e-15 * amax) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (vis(mid) < v ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  if (!(a > 0.0)) return std::nullopt;
  WLikeState s = build(a);
  if (std::abs(visibility_three(s) - v) > 1e-10) return std::nullopt;
  return s;
}

WLikeState c2_eq_c3_state(double v) {
  const double u = upsilon_of(v);
  const double x = (1.0 - u) / (3.0 + u);
  if (x <= 0.0) throw DomainError("c2 = c3 family is degenerate at V = 0");
  const double a = std::sqrt(0.5 * x);
  return WLikeState(std::sqrt(1.0 - x), a, a);
}

WLikeState attainer_state(Attainer att, double v, double ratio) {
  switch (att) {
    case Attainer::w_state: {
      const double c = 1.0 / std::sqrt(3.0);
      return WLikeState(c, c, c);
    }
    case Attainer::c2_eq_c3_family:
      if (v == 1.0) return WLikeState(1.0 / std::sqrt(2.0), 0.5, 0.5);
      return c2_eq_c3_state(v);
    case Attainer::c1_boundary_family: return c2_eq_c3_state(1.0);
    case Attainer::c3_to_zero_family: {
      auto s = sample_family(v, ratio);
      if (!s) throw DomainError("no c3 -> 0 family member at this visibility");
      return *s;
    }
    case Attainer::none: break;
  }
  throw DomainError("no attainer state for this endpoint");
}

std::vector<WLikeState> sample_states_at_visibility(double v, std::size_t n, std::uint64_t seed) {
  upsilon_of(v);
  if (v == 0.0) throw DomainError("no W-like state has zero visibility");
  std::vector<WLikeState> out;
  out.reserve(n);
  constexpr int kMaxAttempts = 1000;
  for (std::size_t i = 0; i < n; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss;
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      if (v < 1.0) {
        const double t = 1.0 - uniform01(rng);
        if (auto s = sample_family(v, t)) {
          out.push_back(*s);
          done = true;
        }
      } else {
        std::array<double, 3> c{std::abs(gauss(rng)), std::abs(gauss(rng)), std::abs(gauss(rng))};
        std::sort(c.begin(), c.end(), std::greater<>());
        if (c[2] > 0.0 && c[0] <= c[1] + c[2]) {
          out.emplace_back(c[0], c[1], c[2]);
          done = true;
        }
      }
    }
    if (!done) throw ConvergenceError("state sampler exhausted its attempts", v);
  }
  return out;
}

}  // namespace atomfringe
