#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "atomfringe/states.hpp"

namespace testutil {

inline atomfringe::WLikeState random_wlike(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::array<double, 3> c{};
  do {
    c = {std::abs(g(rng)), std::abs(g(rng)), std::abs(g(rng))};
    std::sort(c.begin(), c.end(), std::greater<>());
  } while (c[2] < 1e-3 * c[0]);
  return {c[0], c[1], c[2]};
}

inline atomfringe::TwoQubitBlochState random_bloch(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return {u01(rng), std::acos(1.0 - 2.0 * u01(rng)), 2.0 * std::numbers::pi * u01(rng)};
}

}  // namespace testutil
