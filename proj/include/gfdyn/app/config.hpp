#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfdyn/maps.hpp"

namespace gfdyn::app {

using json = nlohmann::json;

struct MapSpec {
  std::string family = "ExpShift";  // ExpAffine | ExpKappa | ExpShift | Sine | ZExpZ | SineAffine
  cplx a = 1.0;                     // ExpAffine
  cplx kappa = -1.0;                // ExpKappa
  std::optional<double> sine_affine_a;  // unset: solve for the critical value -2 pi

  EntireMap build() const;
};

struct PetalSettings {
  std::size_t inequality_samples = 10000;  // per thin sector
  std::size_t radius_samples = 10000;      // used while bisecting r_min
  double radius_cap = 0.2;
  std::size_t cascade_orbits = 100;        // per germ
  double cascade_start_min = 1e-3;         // start modulus range, as fractions of r_min
  double cascade_start_max = 0.5;
  std::size_t cascade_cap = 20000;
  std::size_t chart_samples = 1000;        // per germ, split between the two charts
  double abel_tolerance = 1e-6;
  std::size_t truncation = 4000;
};

struct MetricSettings {
  std::size_t near_samples = 10000;
  std::size_t far_samples = 10000;
  std::size_t eps_samples = 100000;
  double outer_factor = 8;                 // far annulus R < |z| < outer_factor R
  double max_conservative_failure = 0.2;
  std::optional<double> eps_sigma;         // unset: r_min / 2, halved until the near suite passes
};

struct SemiconjSettings {
  std::size_t samples = 200;
  std::size_t levels = 40;
  double safety = 1.25;
  double residual_tolerance = 1e-9;
  double tau_min = 1.2;
  double max_drop_rate = 0.01;
  long address_bound = 3;                  // entries of generated addresses lie in [-b, b]
  std::size_t prefix_length = 3;
  double parabolic_tail_fraction = 0.5;    // share of addresses ending in (0)
};

struct RaySettings {
  std::size_t addresses = 50;
  double potential = 2.0;
  long address_bound = 10;
  std::size_t depth = 50;
  std::size_t endpoint_levels = 40;
  std::optional<std::string> partition_address;  // ray-cut partition; unset: standard strips
};

struct RenderSettings {
  cplx center = 0.0;
  double width = 8;
  std::size_t width_px = 1024;
  std::size_t height_px = 1024;
  std::size_t max_iter = 2000;
  double bailout = 1e6;
  std::size_t tile = 64;
  std::optional<double> sector_radius;     // unset: r_min / 2
  std::string png = "render.png";
};

struct ExperimentConfig {
  MapSpec map;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  PetalSettings petal;
  MetricSettings metric;
  SemiconjSettings semiconj;
  RaySettings ray;
  RenderSettings render;
};

// Throws DynamicsError(ConfigError) naming the offending field.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);  // JSON, comments allowed
json to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

json complex_to_json(cplx z);
cplx complex_from_json(const json& j, const std::string& field);

}  // namespace gfdyn::app
