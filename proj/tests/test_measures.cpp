#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "atomfringe/errors.hpp"
#include "atomfringe/measures.hpp"
#include "test_util.hpp"

using namespace atomfringe;
using doctest::Approx;

namespace {

const double kC3 = std::sqrt(0.03);

WLikeState w_state() {
  const double a = 1.0 / std::sqrt(3.0);
  return {a, a, a};
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("bloch concurrence") {
    CHECK(concurrence_bloch({1.0, std::numbers::pi / 2, 1.3}) == Approx(1.0));
    CHECK(concurrence_bloch({0.0, 1.0, 0.0}) == 0.0);
    CHECK(concurrence_bloch({0.5, std::numbers::pi / 3, 0.0}) == Approx(0.4330127018922193).epsilon(1e-14));
  }

  TEST_CASE("wootters concurrence") {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
    CHECK(concurrence_wootters(DensityMatrix::pure(bell)) == Approx(1.0).epsilon(1e-12));
    Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(4);
    prod(0) = 1.0;
    CHECK(concurrence_wootters(DensityMatrix::pure(prod)) == Approx(0.0).epsilon(1e-12));
    const TwoQubitBlochState st(0.7, 1.1, 2.0);
    CHECK(concurrence_wootters(embed(st)) == Approx(0.6238451520430048).epsilon(1e-10));
  }

  TEST_CASE("wootters equals s sin theta on random states") {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto st = testutil::random_bloch(rng);
      worst = std::max(worst, std::abs(concurrence_wootters(embed(st)) - concurrence_bloch(st)));
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("negativity closed form") {
    const auto w = w_state();
    for (int j = 0; j < 3; ++j) CHECK(negativity_cut(w, j) == Approx(2.0 * std::sqrt(2.0) / 3.0));
    CHECK(negativity_max(WLikeState(1.0 / std::sqrt(2.0), 0.5, 0.5)) == Approx(1.0));
    const WLikeState c(0.9, 0.4, kC3);
    CHECK(negativity_cut(c, 0) == Approx(0.7846018098373211).epsilon(1e-12));
    CHECK(negativity_cut(c, 1) == Approx(0.7332121111929346).epsilon(1e-12));
    CHECK(negativity_cut(c, 2) == Approx(0.34117444218463944).epsilon(1e-12));
    CHECK_THROWS_AS(negativity_cut(c, 3), DomainError);
    const WLikeState d(0.8, 0.59, 0.111355);
    CHECK(negativity_max(d) == Approx(negativity_cut(d, 0)));
  }

  TEST_CASE("largest cut is atom 1 for canonical states") {
    // N = 2 sqrt(x(1-x)) with x = c^2 is symmetric about x = 1/2 and x1 + x2 <= 1.
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
      const auto w = testutil::random_wlike(rng);
      CHECK(negativity_max(w) == negativity_cut(w, 0));
    }
  }

  TEST_CASE("mixedness") {
    CHECK(mixedness(w_state()) == Approx(8.0 / 9.0));
    CHECK(mixedness(WLikeState(std::sqrt(0.5), 0.5, 0.5)) == Approx(5.0 / 6.0));
    CHECK(mixedness(WLikeState(1.0, 1e-6, 1e-6)) == Approx(0.0).epsilon(1e-10));
    CHECK(mixedness(WLikeState(0.9, 0.4, kC3)) == Approx(0.4232).epsilon(1e-12));
  }

  TEST_CASE("geometric closed form") {
    CHECK(geometric_measure_wlike(w_state()) == Approx(5.0 / 9.0));
    CHECK(geometric_measure_wlike(WLikeState(std::sqrt(2.0 / 3), std::sqrt(1.0 / 6), std::sqrt(1.0 / 6))) ==
          Approx(1.0 / 3.0));
    CHECK(geometric_measure_wlike(WLikeState(0.9, 0.4, kC3)) == Approx(0.19).epsilon(1e-12));
  }

  TEST_CASE("geometric measure continuous across the right-angle boundary") {
    // c2 = c3 = a, boundary c1^2 = 2a^2 at a^2 = 1/4.
    for (double eps : {1e-7, 1e-8}) {
      const double a1 = std::sqrt(0.25 - eps), a2 = std::sqrt(0.25 + eps);
      const WLikeState lo(std::sqrt(1 - 2 * a1 * a1), a1, a1);
      const WLikeState hi(std::sqrt(1 - 2 * a2 * a2), a2, a2);
      CHECK(std::abs(geometric_measure_wlike(lo) - geometric_measure_wlike(hi)) < 1e-6);
    }
    const double a = 0.5;
    const WLikeState on(std::sqrt(0.5), a, a);
    const double c0 = 0.5 * (on.c(0) + 2 * a);
    const double r = on.c(0) * a * a / (4 * std::sqrt(c0 * (c0 - on.c(0)) * (c0 - a) * (c0 - a)));
    CHECK(std::abs((1 - 4 * r * r) - (1 - on.c(0) * on.c(0))) < 1e-8);
  }

  TEST_CASE("geometric numeric oracle") {
    Eigen::VectorXcd egg = Eigen::VectorXcd::Zero(8);
    egg(4) = 1.0;
    CHECK(geometric_measure_numeric(DensityMatrix::pure(egg)) == Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(geometric_measure_numeric(embed(w_state())) - 5.0 / 9.0) < 1e-6);
    const WLikeState b(std::sqrt(2.0 / 3), std::sqrt(1.0 / 6), std::sqrt(1.0 / 6));
    CHECK(std::abs(geometric_measure_numeric(embed(b)) - 1.0 / 3.0) < 1e-6);
    const WLikeState c(0.9, 0.4, kC3);
    CHECK(std::abs(geometric_measure_numeric(embed(c)) - 0.19) < 1e-6);
    CHECK_THROWS_AS(geometric_measure_numeric(embed(TwoQubitBlochState(1, 0, 0))), DomainError);
  }

  TEST_CASE("three-pi") {
    CHECK(three_pi(w_state()) == Approx(4.0 * (std::sqrt(5.0) - 1.0) / 9.0).epsilon(1e-13));
    CHECK(three_pi(WLikeState(0.8, 0.6, 1e-8)) < 1e-7);
    const WLikeState c(0.9, 0.4, kC3);
    CHECK(three_pi(c) == Approx(0.08095739653027363).epsilon(1e-12));
    CHECK(three_pi_from_negativities(embed(c)) == Approx(three_pi(c)).epsilon(1e-9));
  }

  TEST_CASE("partial trace and transpose") {
    const WLikeState c(0.9, 0.4, kC3);
    const DensityMatrix rho = embed(c);
    const Eigen::Matrix2cd r0 = reduced_state(rho, 0);
    CHECK(r0(1, 1).real() == Approx(0.81));
    CHECK(r0(0, 0).real() == Approx(0.19));
    const Eigen::MatrixXcd pt = partial_transpose(partial_transpose(rho.matrix(), 1), 1);
    CHECK((pt - rho.matrix()).norm() < 1e-15);
    CHECK_THROWS_AS(partial_transpose(rho.matrix(), 3), DomainError);
    CHECK(partial_trace(rho.matrix(), 2).trace().real() == Approx(1.0));
  }

  TEST_CASE("closed forms agree with density-matrix oracles on random states") {
    std::mt19937_64 rng(12);
    double worst_n = 0, worst_m = 0, worst_p = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto w = testutil::random_wlike(rng);
      const DensityMatrix rho = embed(w);
      for (int j = 0; j < 3; ++j)
        worst_n = std::max(worst_n, std::abs(negativity_cut(w, j) - negativity_partial_transpose(rho, j)));
      worst_m = std::max(worst_m, std::abs(mixedness(w) - mixedness_from_reductions(rho)));
      worst_p = std::max(worst_p, std::abs(three_pi(w) - three_pi_from_negativities(rho)));
    }
    CHECK(worst_n < 1e-10);
    CHECK(worst_m < 1e-10);
    CHECK(worst_p < 1e-9);
  }

  TEST_CASE("product limit") {
    const WLikeState p(1.0, 1e-9, 1e-9);
    CHECK(negativity_max(p) < 1e-8);
    CHECK(mixedness(p) < 1e-15);
    CHECK(geometric_measure_wlike(p) < 1e-15);
    CHECK(three_pi(p) < 1e-15);
  }
}
