#include <doctest.h>

#include <cmath>

#include "atomfringe/bounds.hpp"
#include "atomfringe/errors.hpp"
#include "atomfringe/measures.hpp"
#include "atomfringe/three_atom.hpp"

using namespace atomfringe;
using doctest::Approx;

namespace {

constexpr Measure kAll[] = {Measure::mixedness, Measure::geometric, Measure::negativity_max,
                            Measure::three_pi};

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("reference interval") {
    const double v = 0.9062020991501128;
    const auto m = mixedness_bounds(v);
    CHECK(m.upsilon == Approx(0.42284483619399804).epsilon(1e-12));
    CHECK(m.lower == Approx(0.3927850536987819).epsilon(1e-12));
    CHECK(m.upper == Approx(0.547468163002714).epsilon(1e-12));
    const auto g = geometric_bounds(v);
    CHECK(g.lower == Approx(0.1686185589551189).epsilon(1e-12));
    CHECK(g.upper == Approx(0.288577581903001).epsilon(1e-12));
    const auto n = negativity_bounds(v);
    CHECK(n.lower == Approx(0.7488293277670633).epsilon(1e-12));
    CHECK(n.upper == Approx(v).epsilon(1e-14));
    const auto p = three_pi_bounds(v);
    CHECK(p.lower == 0.0);
    CHECK_FALSE(p.lower_closed);
    CHECK(p.upper == Approx(0.12035378386348279).epsilon(1e-12));
  }

  TEST_CASE("unit-visibility endpoints") {
    CHECK(mixedness_bounds(1.0).lower == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(mixedness_bounds(1.0).upper == Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK(geometric_bounds(1.0).lower == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(geometric_bounds(1.0).upper == Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(negativity_bounds(1.0).lower == Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-15));
    CHECK(negativity_bounds(1.0).upper == 1.0);
    CHECK(three_pi_bounds(1.0).upper == Approx(0.5493636).epsilon(1e-7));
    for (Measure m : kAll) CHECK(bounds_for(m, 1.0).upper_closed);
  }

  TEST_CASE("lower endpoints are continuous at unit visibility") {
    const double v = 1.0 - 1e-12;
    CHECK(std::abs(mixedness_bounds(v).lower - 2.0 / 3.0) < 1e-5);
    CHECK(std::abs(geometric_bounds(v).lower - 1.0 / 3.0) < 1e-5);
  }

  TEST_CASE("three-pi upper endpoint jumps at unit visibility") {
    const double below = three_pi_bounds(1.0 - 1e-12).upper;
    CHECK(below == Approx(2.0 / 27.0 * (4.0 * std::sqrt(5.0) + std::sqrt(17.0) - 9.0)).epsilon(1e-5));
    CHECK(three_pi_bounds(1.0).upper - below > 0.2);
  }

  TEST_CASE("left limits at unit visibility") {
    const auto p = left_limit_at_unit_visibility(Measure::three_pi);
    CHECK(p.upper == Approx(2.0 / 27.0 * (4.0 * std::sqrt(5.0) + std::sqrt(17.0) - 9.0)).epsilon(1e-14));
    CHECK(left_limit_at_unit_visibility(Measure::mixedness).upper == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(left_limit_at_unit_visibility(Measure::geometric).upper == Approx(0.5).epsilon(1e-15));
    CHECK(left_limit_at_unit_visibility(Measure::negativity_max).lower ==
          Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-15));
    CHECK_FALSE(p.lower_closed);
  }

  TEST_CASE("intervals vanish at zero visibility") {
    for (Measure m : kAll) {
      const auto b = bounds_for(m, 0.0);
      CHECK(std::abs(b.lower) < 1e-15);
      CHECK(std::abs(b.upper) < 1e-15);
    }
    CHECK_THROWS_AS(mixedness_bounds(1.1), DomainError);
    CHECK_THROWS_AS(geometric_bounds(-0.1), DomainError);
  }

  TEST_CASE("contains respects open and closed endpoints") {
    const auto b = mixedness_bounds(0.5);
    CHECK(b.contains(b.lower));
    CHECK_FALSE(b.contains(b.upper + 1e-6));
    CHECK(b.contains(0.5 * (b.lower + b.upper)));
    CHECK_FALSE(b.contains(b.lower - 1e-6));
  }

  TEST_CASE("family sampler hits the requested visibility") {
    for (double v : {0.1, 0.5, 0.9, 0.999})
      for (double t : {1e-4, 0.3, 1.0}) {
        const auto s = sample_family(v, t);
        REQUIRE(s.has_value());
        CHECK(visibility_three(*s) == Approx(v).epsilon(1e-10));
        CHECK(s->c(2) / s->c(1) == Approx(t).epsilon(1e-10));
      }
    CHECK_FALSE(sample_family(0.0, 0.5).has_value());
    CHECK_THROWS_AS(sample_family(0.5, 0.0), DomainError);
  }

  TEST_CASE("c2 = c3 state") {
    for (double v : {0.2, 0.7, 0.95}) {
      const auto s = c2_eq_c3_state(v);
      CHECK(visibility_three(s) == Approx(v).epsilon(1e-12));
      CHECK(s.c(1) == Approx(s.c(2)).epsilon(1e-15));
    }
  }

  TEST_CASE("attainers realise the endpoints") {
    for (double v : {0.3, 0.8, 1.0})
      for (Measure m : kAll) {
        const auto b = bounds_for(m, v);
        const auto lo = attainer_state(b.lower_attainer, v);
        const auto hi = attainer_state(b.upper_attainer, v);
        CHECK(std::abs(measure_value(m, lo) - b.lower) < 1e-3);
        CHECK(std::abs(measure_value(m, hi) - b.upper) < 1e-3);
      }
    CHECK_THROWS_AS(attainer_state(Attainer::none, 0.5), DomainError);
  }

  TEST_CASE("sampled states are inside the intervals") {
    for (double v : {0.25, 0.6, 0.97, 1.0}) {
      const auto states = sample_states_at_visibility(v, 400, 17);
      for (const auto& s : states) {
        CHECK(visibility_three(s) == Approx(v).epsilon(1e-9));
        for (Measure m : kAll) CHECK(bounds_for(m, v).contains(measure_value(m, s)));
      }
    }
    CHECK_THROWS_AS(sample_states_at_visibility(0.0, 3, 1), DomainError);
  }

  TEST_CASE("sampler is deterministic") {
    const auto a = sample_states_at_visibility(0.7, 10, 99);
    const auto b = sample_states_at_visibility(0.7, 10, 99);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].c(1) == b[i].c(1));
  }

  TEST_CASE("names") {
    CHECK(to_string(Measure::three_pi) == "three_pi");
    CHECK(to_string(Attainer::w_state) == "w_state");
  }
}
