#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atomfringe/states.hpp"

namespace atomfringe {

enum class Measure { mixedness, geometric, negativity_max, three_pi };

enum class Attainer { w_state, c2_eq_c3_family, c3_to_zero_family, c1_boundary_family, none };

std::string to_string(Measure m);
std::string to_string(Attainer a);

struct BoundInterval {
  Measure measure;
  double visibility;
  double upsilon;  // sqrt(1 - V^2)
  double lower;
  double upper;
  bool lower_closed;
  bool upper_closed;
  Attainer lower_attainer;
  Attainer upper_attainer;

  /// Membership with tolerance; open endpoints are never exceeded by more than tol.
  bool contains(double value, double tol = 1e-9) const;
};

/// All four take V in [0, 1]; DomainError otherwise.
BoundInterval mixedness_bounds(double visibility);
BoundInterval geometric_bounds(double visibility);
BoundInterval negativity_bounds(double visibility);
BoundInterval three_pi_bounds(double visibility);
BoundInterval bounds_for(Measure m, double visibility);

/// Limit of the V < 1 interval as V -> 1 from below.
BoundInterval left_limit_at_unit_visibility(Measure m);

/// Value of the measure on a state.
double measure_value(Measure m, const WLikeState& state);

/// Member of the family c2 = a, c3 = t a with visibility V, t in (0, 1].
/// nullopt when the family has no such member. For V = 1 the boundary c1 = c2 + c3 is returned.
std::optional<WLikeState> sample_family(double visibility, double ratio);

/// c2 = c3 member at visibility V: c1^2 = 1 - x, c2^2 = c3^2 = x/2, x = (1 - u)/(3 + u).
WLikeState c2_eq_c3_state(double visibility);

/// States realising the endpoints of a bound interval; c3 -> 0 families use c3/c2 = ratio.
WLikeState attainer_state(Attainer a, double visibility, double ratio = 1e-4);

/// Deterministic given seed. V < 1 draws c3/c2 uniformly from (0, 1] and solves for the family
/// member; V = 1 samples the positive octant of the sphere and keeps c1 <= c2 + c3.
std::vector<WLikeState> sample_states_at_visibility(double visibility, std::size_t n,
                                                    std::uint64_t seed);

}  // namespace atomfringe
