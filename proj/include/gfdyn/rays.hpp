#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"
#include "gfdyn/semiconj.hpp"

namespace gfdyn {

// Eventually periodic external address: prefix followed by period repeated.
// An empty period means the address is finite and only `prefix` is known.
struct ExternalAddress {
  std::vector<long> prefix;
  std::vector<long> period;

  long operator[](std::size_t n) const;
  bool periodic_tail() const { return !period.empty(); }
  ExternalAddress shifted(std::size_t n = 1) const;
  std::string to_string() const;
  static ExternalAddress parse(const std::string& text);  // e.g. "1 -2 (0)"
};

// Lexicographic comparison over the first `horizon` entries.
int compare_addresses(const ExternalAddress& a, const ExternalAddress& b, std::size_t horizon = 256);

// Potential dynamics F(t) = e^t - 1.
inline double potential_step(double t) { return std::expm1(t); }

struct RayOptions {
  std::size_t depth = 50;           // cap on pullback depth
  std::size_t certify_steps = 20;
  long address_bound = 10;
  double start_potential = 40.0;    // pullback starts once F^n(t) exceeds this
};

struct RayPoint {
  double t = 0;
  cplx z;
  std::size_t depth_used = 0;
  std::size_t certified_steps = 0;
};

struct RayTrace {
  ExternalAddress address;
  std::vector<RayPoint> points;
};

// Points of the dynamic ray with the given address at the requested
// potentials, in the coordinates of f. Exponential maps only.
RayTrace trace_ray(const EntireMap& f, const ExternalAddress& address, std::span<const double> potentials,
                   const RayOptions& options = {});

// Landing point of the ray for an eventually periodic address, by backward
// iteration of the logarithm branches. Needs a contracting inverse
// (disjoint type).
cplx ray_endpoint(const EntireMap& f, const ExternalAddress& address);

// Partition of the plane by the preimages of a ray. Without an address the
// standard strips |Im xi - 2 pi k| < pi are used.
struct Partition {
  std::optional<ExternalAddress> ray_address;
  std::vector<double> ray_potentials = {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0};
};

std::vector<long> itinerary(const EntireMap& f, cplx z, const Partition& partition, std::size_t depth,
                            double boundary_tolerance = 1e-9);

std::vector<long> symbolic_itinerary(const ExternalAddress& address, const Partition& partition,
                                     std::size_t depth);

// Pullback samples at landing points of eventually periodic rays. The
// g-orbit is filled in symbolically so it never degrades.
PullbackSample endpoint_sample(const EntireMap& g, const ExternalAddress& address, std::size_t depth);

// Escaping samples: points of rays at potential t, with their g-orbit
// computed forward until overflow.
PullbackSample ray_point_sample(const EntireMap& g, const ExternalAddress& address, double t,
                                std::size_t depth);

}  // namespace gfdyn
