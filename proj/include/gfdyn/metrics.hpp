#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"
#include "gfdyn/parabolic.hpp"

namespace gfdyn {

struct RamificationPoint {
  cplx point;        // w with f(w) in Par
  int degree = 1;    // deg(f, w)
  int weight = 1;    // v(w)
};

struct RamificationData {
  int n_sigma = 1;
  double s = 0.5;    // 1 - 1/(2 n_sigma)
  std::vector<RamificationPoint> contributions;
  bool asymptotic_value_in_julia = false;
  std::string note;
};

// Orbifold data over the parabolic points of f. Exponential maps whose
// asymptotic value lands on a parabolic point are rejected.
RamificationData ramification_data(const EntireMap& f);

struct MetricConfig {
  EntireMap map;
  std::vector<ParabolicGerm> germs;       // one per parabolic point
  int n_sigma = 1;
  double s = 0.5;
  double petal_radius = 0;                // validated thin-sector radius
  double eps_sigma = 0;
  double comparison_disc_radius = 0;      // R: comparison region is |z| > R
  std::vector<SectorSpec> petal_domains;  // attracting sectors, stand-in for D'

  std::vector<cplx> par_points() const;
};

struct MetricBuildOptions {
  std::size_t radius_samples = 10000;
  std::size_t eps_samples = 100000;
  std::uint64_t seed = 0;
  double radius_cap = 0.2;
  double comparison_disc_radius = 0;  // filled in later when 0
};

// Germs, validated radius, ramification data and eps_sigma. The comparison
// radius is left as given (usually set from the rescaling choice).
MetricConfig build_metric_config(const EntireMap& f, const MetricBuildOptions& options = {});

double parabolic_distance(const MetricConfig& cfg, cplx z);
bool in_petal_domains(const MetricConfig& cfg, cplx z);

// omega = d_Par^{-s}; AtParabolic when z is a parabolic point.
double omega_density(const MetricConfig& cfg, cplx z);

struct DensityBracket {
  double lower = 0;
  double upper = 0;
};

// Exact densities of model domains bracketing the orbifold density far from
// Par. upper needs |z| > R, lower needs z outside the petal discs.
DensityBracket comparison_densities(const MetricConfig& cfg, cplx z);

struct SigmaValue {
  bool near = false;  // omega regime, lower == upper
  double lower = 0;
  double upper = 0;   // +inf when no upper bound is available
};
SigmaValue sigma_density(const MetricConfig& cfg, cplx z);

struct ExpansionFactor {
  double conservative = 0;
  double optimistic = 0;
  bool source_near = false;
  bool image_near = false;
};
// |f'(z)| sigma(f z) / sigma(z), bracketed.
ExpansionFactor expansion_factor(const MetricConfig& cfg, cplx z);

struct SuiteReport {
  std::size_t samples = 0;
  std::size_t failures = 0;            // conservative <= 1 (near: exact <= 1)
  std::size_t optimistic_failures = 0; // optimistic <= 1
  double min_conservative = 0;
  double min_optimistic = 0;
  std::optional<cplx> witness;
  bool passed() const { return optimistic_failures == 0; }
  double conservative_failure_rate() const {
    return samples ? static_cast<double>(failures) / samples : 0.0;
  }
};

// omega-weighted factor on thin-sector samples with d_Par < eps.
SuiteReport near_parabolic_suite(const MetricConfig& cfg, double eps, std::size_t samples,
                                 std::uint64_t seed = 0);

// Bracketed factor on R < |z| < outer_factor * R with |f(z)| > R.
SuiteReport far_regime_suite(const MetricConfig& cfg, std::size_t samples, std::uint64_t seed = 0,
                             double outer_factor = 8.0);

// Largest eps <= cap passing the near suite, by bisection.
double select_eps_sigma(const MetricConfig& cfg, double cap, std::size_t samples,
                        std::uint64_t seed = 0);

}  // namespace gfdyn
