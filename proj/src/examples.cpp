#include "gfdyn/examples.hpp"

#include <cmath>
#include <numbers>

#include "gfdyn/parabolic.hpp"

namespace gfdyn {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sine_affine_parameter() {
  auto h = [](double a) { return (1 + std::sin(a)) / std::cos(a) - 2 * kPi; };
  double lo = 0, hi = kPi / 2 - 1e-9;
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (h(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<ExampleMap> standard_examples() {
  return {
      {"f1", EntireMap::exp_shift(), {1.0}},
      {"f2", EntireMap::sine(), {0.0}},
      {"f3", EntireMap::z_exp_z(), {0.0}},
      {"f4", EntireMap::sine_affine(sine_affine_parameter()), {0.0}},
  };
}

std::string_view to_string(SingularFate fate) {
  switch (fate) {
    case SingularFate::AttractedToParabolic: return "attracted_to_parabolic";
    case SingularFate::AttractedToCycle: return "attracted_to_cycle";
    case SingularFate::LandsOnParabolic: return "lands_on_parabolic";
    case SingularFate::Escapes: return "escapes";
    case SingularFate::Undetermined: return "undetermined";
  }
  return "undetermined";
}

MapClassification classify_map(const EntireMap& f, std::size_t max_steps) {
  MapClassification out;
  std::vector<ParabolicGerm> germs;
  for (cplx zeta : parabolic_points(f)) germs.push_back(fit_germ(f, zeta));
  out.has_parabolic = !germs.empty();

  std::vector<SectorSpec> petals;
  for (const auto& g : germs)
    for (std::size_t j = 0; j < g.attracting.size(); ++j)
      petals.push_back(attracting_sector(g, j, 0.05, kPi / g.p));

  for (const auto& sv : f.singular_values()) {
    SingularOrbit orb;
    orb.value = sv;
    cplx z = sv.value;
    for (std::size_t n = 0; n <= max_steps; ++n) {
      bool done = false;
      for (const auto& g : germs)
        if (std::abs(z - g.zeta) < 1e-12 * std::max(1.0, std::abs(g.zeta))) {
          orb.fate = SingularFate::LandsOnParabolic;
          orb.limit = g.zeta;
          done = true;
        }
      for (const auto& sec : petals)
        if (!done && sec.contains(z)) {
          orb.fate = SingularFate::AttractedToParabolic;
          orb.limit = sec.vertex;
          done = true;
        }
      if (!done && overflowed(z)) {
        orb.fate = SingularFate::Escapes;
        done = true;
      }
      if (!done) {
        cplx next = f.eval(z);
        if (std::abs(next - z) < 1e-13 * std::max(1.0, std::abs(z)) && std::abs(f.derivative(z)) < 1) {
          orb.fate = SingularFate::AttractedToCycle;
          orb.limit = next;
          done = true;
        }
        z = next;
      }
      if (done) {
        orb.steps = n;
        break;
      }
    }
    if (sv.kind == SingularKind::Asymptotic && orb.fate == SingularFate::LandsOnParabolic)
      out.asymptotic_value_in_julia = true;
    out.orbits.push_back(orb);
  }
  bool all_known = true;
  for (const auto& o : out.orbits)
    if (o.fate == SingularFate::Escapes || o.fate == SingularFate::Undetermined) all_known = false;
  out.geometrically_finite = all_known;
  out.strongly_geometrically_finite = all_known && !out.asymptotic_value_in_julia;
  out.subhyperbolic = all_known && !out.has_parabolic;
  return out;
}

int count_solutions_in_disc(const EntireMap& f, cplx target, cplx center, double radius, std::size_t nodes) {
  double total = 0;
  cplx prev = f.eval(center + radius) - target;
  for (std::size_t j = 1; j <= nodes; ++j) {
    cplx cur = f.eval(center + std::polar(radius, 2 * kPi * static_cast<double>(j) / nodes)) - target;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

}  // namespace gfdyn
