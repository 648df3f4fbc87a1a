#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atomfringe/errors.hpp"
#include "atomfringe/photon_sim.hpp"
#include "atomfringe/two_atom.hpp"

using namespace atomfringe;
using doctest::Approx;

constexpr double kPi = std::numbers::pi;

TEST_SUITE("photon_sim") {
  TEST_CASE("histogram basics") {
    auto h = make_histogram(-1.0, 1.0, 4);
    fill(h, -1.0);
    fill(h, 1.0);
    fill(h, 0.1);
    fill(h, 2.0);
    CHECK(h.total == 3);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[2] == 1);
    CHECK(h.counts[3] == 1);
    CHECK(h.intensity(0) == Approx(1.0 / (3 * 0.5)));
    CHECK(h.stderr_of(0) == Approx(1.0 / (3 * 0.5)));
    CHECK_THROWS_AS(make_histogram(1.0, 0.0, 4), DomainError);
  }

  TEST_CASE("spectral window") {
    const auto w = spectral_window(0.3, -0.2, 50.0);
    CHECK(w[0] == Approx(-50.2));
    CHECK(w[1] == Approx(50.3));
    CHECK_THROWS_AS(spectral_window(0, 0, 0), DomainError);
  }

  TEST_CASE("sampling is reproducible and independent of thread count") {
    const TwoQubitBlochState st(0.7, 1.1, 0.4);
    SimOptions a;
    a.chunk = 1000;
    a.threads = 1;
    SimOptions b = a;
    b.threads = 4;
    const auto x = sample_photons_two(st, 5.0, 5000, 77, a);
    const auto y = sample_photons_two(st, 5.0, 5000, 77, b);
    REQUIRE(x.size() == 5000);
    for (std::size_t i = 0; i < x.size(); i += 97) CHECK((x[i].direction - y[i].direction).norm() == 0.0);
    const auto z = sample_photons_two(st, 5.0, 5000, 78, a);
    CHECK((x[0].direction - z[0].direction).norm() > 0.0);
    const auto h1 = simulate_fringe_two(st, 5.0, 20000, 3, 40, a);
    const auto h2 = simulate_fringe_two(st, 5.0, 20000, 3, 40, b);
    CHECK(h1.counts == h2.counts);
    CHECK(h1.total == 20000);
  }

  TEST_CASE("directions are unit vectors and filtered detuning is fixed") {
    SimOptions o;
    o.omega = 0.4;
    const auto x = sample_photons_two(TwoQubitBlochState(0.5, 1.0, 0.0), 3.0, 2000, 5, o);
    for (const auto& p : x) {
      CHECK(p.direction.norm() == Approx(1.0).epsilon(1e-12));
      CHECK(p.omega == 0.4);
    }
  }

  TEST_CASE("filtered fringe histogram follows the analytic law") {
    const TwoQubitBlochState st(0.8, 1.3, 2.0);
    for (double u : {4.0, 12.0}) {
      const auto h = simulate_fringe_two(st, u, 400000, 11, 64);
      const auto p = fringe_bin_probabilities_two(st, u, 0.0, h);
      const auto gof = chi_square_gof(h.counts, p);
      CHECK(gof.dof == 63);
      CHECK(gof.p_value > 1e-4);
    }
  }

  TEST_CASE("visibility estimate is consistent with the closed form") {
    const TwoQubitBlochState st(0.9, 1.2, 0.5);
    const double u = 8 * kPi;
    const auto h = simulate_fringe_two(st, u, 1000000, 21, 128);
    const auto est = estimate_visibility(h);
    const double v = visibility_two(st, u, 0.0, VisibilityMode::physical);
    CHECK(est.sigma > 0.0);
    CHECK(std::abs(est.value - v) < 4.0 * est.sigma);
    CHECK(est.offset == Approx(1.0 / (2 * u)).epsilon(0.01));
  }

  TEST_CASE("estimator rejects sparse histograms") {
    auto h = make_histogram(-1, 1, 16);
    for (int i = 0; i < 200; ++i) fill(h, 0.0);
    CHECK_THROWS_AS(estimate_visibility(h), InsufficientData);
    auto g = make_histogram(-1, 1, 64);
    CHECK_THROWS_AS(estimate_visibility(g), InsufficientData);
  }

  TEST_CASE("goodness of fit pools sparse bins") {
    const std::vector<std::uint64_t> counts{0, 1, 50, 49, 1, 0};
    const std::vector<double> probs{0.005, 0.005, 0.49, 0.49, 0.005, 0.005};
    const auto g = chi_square_gof(counts, probs);
    CHECK(g.dof == 1);
    CHECK(g.p_value > 0.5);
    CHECK_THROWS_AS(chi_square_gof({1, 2}, {1.0}), DomainError);
  }

  TEST_CASE("spectral mode draws detunings from the line mixture") {
    SimOptions o;
    o.mode = OmegaMode::spectral;
    const TwoQubitBlochState st(0.0, 0.0, 0.0);
    const double u = 6.0;
    const auto x = sample_photons_two(st, u, 200000, 9, o);
    const auto pc = eigenmodes_two(u);
    const auto w = spectral_window(pc.omega_plus, pc.omega_minus, 50.0);
    std::size_t inside = 0;
    for (const auto& p : x) {
      CHECK(p.omega >= w[0]);
      CHECK(p.omega <= w[1]);
      if (std::abs(p.omega) < 0.5) ++inside;
    }
    // Angle-averaged weights for s = 0 are (1 +- f)/4.
    auto cdf = [](double x, double c, double g) { return std::atan((x - c) / (0.5 * g)) / (0.5 * g); };
    auto mass = [&](double a, double b) {
      return (1 + pc.f) * (cdf(b, pc.omega_plus, pc.gamma_plus) - cdf(a, pc.omega_plus, pc.gamma_plus)) +
             (1 - pc.f) * (cdf(b, pc.omega_minus, pc.gamma_minus) - cdf(a, pc.omega_minus, pc.gamma_minus));
    };
    const double expect = mass(-0.5, 0.5) / mass(w[0], w[1]);
    const double frac = static_cast<double>(inside) / static_cast<double>(x.size());
    CHECK(std::abs(frac - expect) < 5.0 * std::sqrt(expect * (1 - expect) / static_cast<double>(x.size())));
  }

  TEST_CASE("three-atom sampling") {
    const WLikeState s(0.7, 0.55, 0.45);
    const auto x = sample_photons_three(s, TriangleGeometry(8.0), 2000, 4);
    CHECK(x.size() == 2000);
    CHECK_THROWS_AS(sample_photons_three(WLikeState(0.7, 0.55, 0.45, 0.3, 0.0), TriangleGeometry(8.0), 10, 1),
                    DomainError);
  }

  TEST_CASE("three-atom density turns negative near the subradiant line at short range") {
    const WLikeState s(0.9, 0.4, 0.17);
    SimOptions o;
    o.omega = eigenmodes_three(0.5).omega_minus;
    CHECK_THROWS_AS(sample_photons_three(s, TriangleGeometry(0.5), 20000, 4, o), InternalError);
    o.omega = eigenmodes_three(3.0).omega_minus;
    CHECK_NOTHROW(sample_photons_three(s, TriangleGeometry(3.0), 20000, 4, o));
  }
}
