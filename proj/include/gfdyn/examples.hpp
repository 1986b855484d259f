#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"

namespace gfdyn {

// The real a in (0, pi/2) with (1 + sin a)/cos a = 2 pi, so that the critical
// value (-1 - sin a)/cos a of SineAffine(a) equals -2 pi.
double sine_affine_parameter();

struct ExampleMap {
  std::string id;   // f1..f4
  EntireMap map;
  std::vector<cplx> par_points;
};

// e^{z-1}, sin z, z e^z and SineAffine at the parameter above.
std::vector<ExampleMap> standard_examples();

enum class SingularFate { AttractedToParabolic, AttractedToCycle, LandsOnParabolic, Escapes, Undetermined };
std::string_view to_string(SingularFate fate);

struct SingularOrbit {
  SingularValue value;
  SingularFate fate = SingularFate::Undetermined;
  std::size_t steps = 0;
  cplx limit;
};

struct MapClassification {
  bool has_parabolic = false;
  bool geometrically_finite = false;
  bool strongly_geometrically_finite = false;
  bool subhyperbolic = false;
  bool asymptotic_value_in_julia = false;
  std::vector<SingularOrbit> orbits;
};

// Follows every singular orbit until it is captured by an attracting petal
// or cycle, lands on a parabolic point, escapes, or max_steps runs out.
MapClassification classify_map(const EntireMap& f, std::size_t max_steps = 200000);

// Number of solutions of f(z) = target in |z - center| < radius, counted by
// the argument principle.
int count_solutions_in_disc(const EntireMap& f, cplx target, cplx center, double radius,
                            std::size_t nodes = 1 << 14);

}  // namespace gfdyn
