#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "atomfringe/errors.hpp"
#include "atomfringe/three_atom.hpp"
#include "atomfringe/tomography.hpp"
#include "atomfringe/two_atom.hpp"
#include "test_util.hpp"

using namespace atomfringe;
using doctest::Approx;

constexpr double kPi = std::numbers::pi;

namespace {

std::vector<FringeSample> fringe_samples(const TwoQubitBlochState& st, const std::vector<double>& us,
                                         int phases, double scale = 1.0) {
  std::vector<FringeSample> out;
  for (double u : us)
    for (int k = 0; k < phases; ++k) {
      const double chi = -kPi + 2.0 * kPi * k / phases;
      out.push_back({chi, 0.0, u, scale * emission_spectrum_two(st, u, 0.0, chi)});
    }
  return out;
}

std::vector<TorusSample> torus_samples(const WLikeState& s, const std::vector<std::array<double, 2>>& d,
                                       double scale = 1.0) {
  std::vector<TorusSample> out;
  for (const auto& p : d) out.push_back({p[0], p[1], scale * farfield_intensity(s, p[0], p[1])});
  return out;
}

double vec_err(const TwoQubitBlochState& a, const TwoQubitBlochState& b) {
  return (a.bloch_vector() - b.bloch_vector()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("tomography") {
  TEST_CASE("single-separation fringe fit recovers sx and sy - g sz") {
    const TwoQubitBlochState st(0.8, 1.2, 0.9);
    const double u = 3.7;
    const auto fit = fit_fringe_two(fringe_samples(st, {u}, 12, 2.5));
    const double g = std::cos(u) / u;
    CHECK(fit.scale == Approx(2.5).epsilon(1e-12));
    CHECK(fit.sx == Approx(st.sx()).epsilon(1e-12));
    CHECK(fit.q == Approx(st.sy() - g * st.sz()).epsilon(1e-12));
    CHECK(fit.residual < 1e-12);
    CHECK_THROWS_AS(fit_fringe_two({{0.0, 0.0, u, 1.0}, {0.0, 0.0, u, 1.0}, {0.0, 0.0, u, 1.0}}),
                    IllPosed);
  }

  TEST_CASE("exact fit at one separation is ill posed") {
    const TwoQubitBlochState st(0.8, 1.2, 0.9);
    CHECK_THROWS_AS(tomography_two_exact(fringe_samples(st, {4.0}, 16)), IllPosed);
    CHECK_THROWS_AS(tomography_two_exact({}), InsufficientData);
  }

  TEST_CASE("exact fit across separations recovers the state") {
    std::mt19937_64 rng(41);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto st = testutil::random_bloch(rng);
      const auto r = tomography_two_exact(fringe_samples(st, {1.0, kPi, 4 * kPi}, 8, 3.0));
      worst = std::max(worst, vec_err(r.state, st));
      CHECK(r.scale == Approx(3.0).epsilon(1e-9));
      CHECK(r.residual < 1e-10);
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("exact fit projects unphysical vectors") {
    const TwoQubitBlochState st(1.0, 1.0, 0.5);
    auto s = fringe_samples(st, {1.0, 2.0}, 8);
    for (auto& x : s) x.intensity *= 1.0 + 0.02 * std::cos(3 * x.chi);
    const auto r = tomography_two_exact(s);
    CHECK(r.state.s() <= 1.0);
    if (r.raw_vector.norm() > 1.0) CHECK(r.projected);
  }

  TEST_CASE("first-order scheme inverts its own model exactly") {
    const TwoQubitBlochState st(0.9, 1.0, 0.6);
    for (double u : {3.0, 10.0, 40.0}) {
      FirstOrderInput in{firstorder_fringe(st, u, 0.0), firstorder_fringe(st, u, kPi),
                         firstorder_fringe(st, u, kPi / 2), firstorder_fringe(st, u, -kPi / 2),
                         firstorder_theta0(st, u)};
      const auto r = tomography_two_firstorder(in, u);
      CHECK((r.raw_vector - st.bloch_vector()).norm() < 1e-10);
      CHECK(r.truncation_error == Approx(std::pow(std::max(std::abs(std::sin(u)), std::abs(std::cos(u))) / u, 2)));
    }
  }

  TEST_CASE("first-order scheme on exact data errs at second order") {
    const TwoQubitBlochState st(0.9, 1.0, 0.6);
    for (double u : {50.5, 200.5}) {
      const auto samples = fringe_samples(st, {u}, 4);
      const double th0 = fringe_params_two(st, u, 0.0).theta0;
      const auto r = tomography_two_firstorder(firstorder_input(samples, th0), u);
      CHECK(std::abs(r.raw_vector(0) - st.sx()) < 10.0 * r.truncation_error);
    }
  }

  TEST_CASE("first-order scheme is singular where f vanishes") {
    const TwoQubitBlochState st(0.9, 1.0, 0.6);
    FirstOrderInput in{1.0, 0.5, 0.8, 0.7, 0.1};
    CHECK_THROWS_AS(tomography_two_firstorder(in, kPi), IllPosed);
    CHECK_THROWS_AS(tomography_two_firstorder(in, kPi / 2), IllPosed);
    CHECK_THROWS_AS(firstorder_input(fringe_samples(st, {3.0}, 3), 0.0), InsufficientData);
  }

  TEST_CASE("three-atom reconstruction on the default design") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    double worst_c = 0.0, worst_p = 0.0;
    for (int i = 0; i < 40; ++i) {
      const auto w = testutil::random_wlike(rng);
      const WLikeState s(w.c(0), w.c(1), w.c(2), ph(rng), ph(rng));
      const auto r = tomography_three(torus_samples(s, default_torus_design(), 1.7));
      for (std::size_t k = 0; k < 3; ++k) worst_c = std::max(worst_c, std::abs(r.c_atom_order[k] - s.c(k)));
      worst_p = std::max(worst_p, std::abs(std::remainder(r.phi2 - s.phi2(), 2 * kPi)));
      worst_p = std::max(worst_p, std::abs(std::remainder(r.phi3 - s.phi3(), 2 * kPi)));
      CHECK(r.scale == Approx(1.7).epsilon(1e-8));
    }
    CHECK(worst_c < 1e-8);
    CHECK(worst_p < 1e-8);
  }

  TEST_CASE("three-atom reconstruction from five samples") {
    const WLikeState s(0.7, 0.55, 0.45, 0.5, -0.8);
    const std::vector<std::array<double, 2>> d{{0.0, 0.0}, {2.0, 0.0}, {0.0, 2.0}, {1.0, 4.0}, {4.0, 1.5}};
    const auto r = tomography_three(torus_samples(s, d));
    for (std::size_t k = 0; k < 3; ++k) CHECK(r.c_atom_order[k] == Approx(s.c(k)).epsilon(1e-7));
    CHECK(std::abs(std::remainder(r.phi2 - 0.5, 2 * kPi)) < 1e-6);
    CHECK(std::abs(std::remainder(r.phi3 + 0.8, 2 * kPi)) < 1e-6);
  }

  TEST_CASE("three-atom result is canonicalized") {
    const std::array<cdouble, 3> amps{0.3, std::polar(0.8, 1.0), std::polar(0.5, -0.4)};
    const double n = std::sqrt(0.09 + 0.64 + 0.25);
    std::vector<TorusSample> samples;
    for (const auto& p : default_torus_design()) {
      const double t3 = -p[0] - p[1];
      const double i = std::norm(amps[0]) + std::norm(amps[1]) + std::norm(amps[2]) +
                       2.0 * std::real(amps[1] * std::conj(amps[2]) * std::polar(1.0, -p[0])) +
                       2.0 * std::real(amps[2] * std::conj(amps[0]) * std::polar(1.0, -p[1])) +
                       2.0 * std::real(amps[0] * std::conj(amps[1]) * std::polar(1.0, -t3));
      samples.push_back({p[0], p[1], i / (n * n)});
    }
    const auto r = tomography_three(samples);
    CHECK(r.result.permutation == std::array<int, 3>{1, 2, 0});
    CHECK(r.result.state.c(0) == Approx(0.8 / n).epsilon(1e-8));
    CHECK(r.result.state.c(2) == Approx(0.3 / n).epsilon(1e-8));
    CHECK(r.c_atom_order[0] == Approx(0.3 / n).epsilon(1e-8));
    CHECK(std::abs(std::remainder(r.phi2 - 1.0, 2 * kPi)) < 1e-7);
    CHECK(std::abs(std::remainder(r.phi3 + 0.4, 2 * kPi)) < 1e-7);
  }

  TEST_CASE("three-atom input validation") {
    const WLikeState s(0.7, 0.55, 0.45);
    auto few = torus_samples(s, default_torus_design());
    few.resize(4);
    CHECK_THROWS_AS(tomography_three(few), InsufficientData);
    std::vector<TorusSample> same(9, TorusSample{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(tomography_three(same), IllPosed);
    auto bad = torus_samples(s, default_torus_design());
    bad[0].intensity = -1.0;
    CHECK_THROWS_AS(tomography_three(bad), DomainError);
  }

  TEST_CASE("combining per-separation fits with independent scales") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto st = testutil::random_bloch(rng);
      std::vector<FringeFit> fits;
      double scale = 1.0;
      for (double u : {4 * kPi, 4.5 * kPi, 2.0}) {
        auto s = fringe_samples(st, {u}, 16, scale);
        for (auto& x : s) x.sigma = 1e-3;
        fits.push_back(fit_fringe_two(s));
        scale *= 7.0;
      }
      const auto r = combine_fringe_fits(fits);
      CHECK(vec_err(r.state, st) < 1e-9);
      CHECK(r.covariance.diagonal().minCoeff() > 0.0);
    }
    const TwoQubitBlochState st(0.6, 1.0, 0.7);
    auto s = fringe_samples(st, {4 * kPi}, 16);
    for (auto& x : s) x.sigma = 1e-3;
    CHECK_THROWS_AS(combine_fringe_fits({fit_fringe_two(s)}), IllPosed);
    CHECK_THROWS_AS(combine_fringe_fits({}), InsufficientData);
  }

  TEST_CASE("default design") {
    const auto d = default_torus_design();
    CHECK(d.size() == 9);
    CHECK(d[4][0] == Approx(2 * kPi / 3));
  }
}
