#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"
#include "gfdyn/metrics.hpp"

namespace gfdyn {

struct RescalingChoice {
  double K = 0;
  double L = 0;
  cplx lambda;              // K / L
  double safety = 1.25;
  double max_postsingular = 0;
  double floor_radius = 0;  // parabolic neighbourhoods must fit in B(0, K/2)
  double max_on_circle = 0; // max |f| on |z| = K
  std::size_t grid_points = 0;
};

// Largest |f| on the circle |z| = radius; the grid starts at 256 points and
// doubles until the maximum changes by less than 1e-9 relative.
double max_modulus_on_circle(const EntireMap& f, double radius, std::size_t* grid_used = nullptr);

// Radius of B(0, .) that must hold the parabolic points with their petal
// and eps neighbourhoods.
double parabolic_floor(const MetricConfig& cfg);

RescalingChoice choose_rescaling(const EntireMap& f, double safety = 1.25, double floor_radius = 0,
                                 std::size_t orbit_steps = 200);

EntireMap rescaled_map(const EntireMap& f, const RescalingChoice& choice);

struct DisjointTypeReport {
  double max_on_circle = 0;  // max |g| on |z| = L
  double margin = 0;         // L / max_on_circle
  cplx attracting_fixed_point;
  double multiplier = 0;
};

// g = f(lambda z) maps the closed disc of radius L into itself with room to
// spare. MarginTooSmall when L / max|g| <= 1 + min_margin.
DisjointTypeReport verify_disjoint_type(const EntireMap& f, const RescalingChoice& choice,
                                        double min_margin = 1e-6);

// A point of J(g) together with its g-orbit. Orbits can come from forward
// iteration or from symbolic data (periodic tails), which keeps them exact
// for arbitrarily many levels.
struct PullbackSample {
  cplx start;
  std::vector<cplx> orbit;  // orbit[0] == start, orbit[i+1] == g(orbit[i])
  std::string label;
};

PullbackSample forward_sample(const EntireMap& g, cplx z, std::size_t depth);

// Point of J(g) reached by the inverse branches prefix[0], prefix[1], ...
// followed by `period` repeated; the periodic part is solved by backward
// iteration, so g must be of disjoint type. Works for exponential and sine
// kernels; for sine, `upper` picks the half-plane the periodic tail lives in.
// NoConvergence if the backward iteration does not settle.
PullbackSample symbolic_sample(const EntireMap& g, const std::vector<long>& prefix,
                               const std::vector<long>& period, std::size_t depth, bool upper = true);

struct PullbackOptions {
  std::size_t levels = 40;
  std::size_t segment_points = 8;
  ContinuationOptions continuation;
  unsigned threads = 1;
  double residual_tolerance = 1e-9;
};

struct SampleTrace {
  std::string label;
  cplx start;
  std::vector<cplx> theta;          // theta[k] = vartheta^k(start)
  std::vector<double> step_lengths; // |theta[k+1] - theta[k]|
  std::vector<double> sigma_lengths;// sigma-length of the path gamma^k(start)
  double max_residual = 0;          // max |f(vartheta^{j+1}(z_i)) - vartheta^j(z_{i+1})|, relative
  bool dropped = false;
  std::string drop_reason;
};

struct PullbackResult {
  std::vector<SampleTrace> samples;
  std::size_t levels = 0;
  std::size_t dropped = 0;
  double max_residual = 0;
  double drop_rate() const { return samples.empty() ? 0.0 : static_cast<double>(dropped) / samples.size(); }
};

// Builds vartheta^k for k <= levels by lifting the isotopy paths
// gamma^0(z) = [z, lambda z] through f. The metric is used only to weight
// path lengths; pass nullptr to skip sigma lengths.
PullbackResult run_pullback(const EntireMap& f, const RescalingChoice& choice,
                            const std::vector<PullbackSample>& samples, const PullbackOptions& options,
                            const MetricConfig* metric = nullptr);

struct ConvergenceFit {
  double tau_euclid = 0;
  double tau_sigma = 0;
  bool far_regime = false;   // geometric rather than polynomial decay
  double geometric_ratio = 0;
  bool usable = false;
};

ConvergenceFit fit_convergence(const SampleTrace& trace, std::size_t k_min);

struct ConvergenceReport {
  std::vector<ConvergenceFit> fits;
  double tau_hat = 0;        // smallest sigma-weighted rate over polynomial-regime samples
  double tau_hat_median = 0;
  double tau_hat_euclid = 0; // same minimum for plain step lengths
  std::size_t polynomial_samples = 0;
  std::size_t far_samples = 0;
  double drop_rate = 0;
  double max_residual = 0;
};

ConvergenceReport convergence_report(const PullbackResult& result, std::size_t k_min = 0);

}  // namespace gfdyn
