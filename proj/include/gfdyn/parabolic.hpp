#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfdyn/maps.hpp"

namespace gfdyn {

// f(zeta + u) = zeta + u + a u^{p+1} + ...
struct ParabolicGerm {
  cplx zeta;
  int p = 0;
  cplx a;
  std::vector<cplx> coefficients;  // c_0..c_M of f about zeta
  std::vector<cplx> repelling;     // p a v^p = +1
  std::vector<cplx> attracting;    // p a v^p = -1
};

// Multiple fixed points known in closed form for the supported kernels.
std::vector<cplx> parabolic_points(const EntireMap& f, double tol = 1e-9);

ParabolicGerm fit_germ(const EntireMap& f, cplx zeta, double tol = 1e-10);

// Taylor coefficients from the trapezoid rule on a circle. Only used to
// cross-check the closed forms.
std::vector<cplx> taylor_by_cauchy(const EntireMap& f, cplx z0, int order,
                                   double radius = 1e-2, int nodes = 64);

struct SectorSpec {
  cplx vertex;
  cplx direction;   // only the argument matters
  double opening;   // full opening angle
  double radius;
  bool contains(cplx z) const;
};

SectorSpec thin_repelling_sector(const ParabolicGerm& germ, std::size_t index, double radius);
// Default opening 7 pi / (4p): together with the thin sectors this fills a
// punctured disc about zeta.
SectorSpec attracting_sector(const ParabolicGerm& germ, std::size_t index, double radius,
                             double opening = 0);

// Signed angle from direction `v` to `w`, in (-pi, pi].
double angle_between(cplx v, cplx w);

struct InequalityReport {
  bool passed = true;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double radius = 0;
  double min_modulus_margin = 0;     // min |g(z)-zeta| / |z-zeta| - 1
  double min_derivative_margin = 0;  // min |g'(z)| |z-zeta| / |g(z)-zeta| - 1
  std::optional<cplx> witness;
  std::string failed_check;

  void raise_if_failed() const;
};

// Checks the thin repelling sector expansion and trapping inequalities on
// samples stratified in log-radius and angle. samples is per sector.
InequalityReport thin_sector_inequalities(const EntireMap& f, const ParabolicGerm& germ, double r0,
                                          std::size_t samples, std::uint64_t seed = 0);

// Largest r <= cap for which thin_sector_inequalities passes, by bisection.
double validated_radius(const EntireMap& f, const ParabolicGerm& germ,
                        std::size_t samples = 10000, double cap = 0.2, std::uint64_t seed = 0);

enum class PetalKind { Repelling, Attracting };

// Fatou coordinate chart around one petal. In the coordinate
// w = kappa(z) = -1/(p a (z-zeta)^p) the germ reads G(w) = w + 1 + o(1); the
// repelling chart lives on Re w < -rho, the attracting one on Re w > rho.
class FatouChart {
 public:
  static FatouChart from_germ(const EntireMap& f, const ParabolicGerm& germ, PetalKind kind,
                              std::size_t branch, double radius, std::size_t truncation = 4000);
  // G(w) = w + 1 exactly. Phi is then the identity up to a constant.
  static FatouChart translation(PetalKind kind = PetalKind::Repelling, double rho = 1.0);

  PetalKind kind() const { return kind_; }
  double rho() const { return rho_; }
  double beta() const { return beta_; }
  std::size_t truncation() const { return truncation_; }
  cplx base_point() const { return base_point_; }
  bool synthetic() const { return !map_.has_value(); }
  const std::optional<ParabolicGerm>& germ() const { return germ_; }

  bool in_domain(cplx w, double margin = 0) const;
  cplx kappa(cplx z) const;
  cplx kappa_inverse(cplx w) const;
  cplx G(cplx w) const;
  cplx G_inverse(cplx w) const;

  // Phi normalized so Phi(base_point) = 0; throws OutOfChart.
  cplx phi(cplx w) const;
  // Un-normalized limit approximation at truncation depth.
  cplx phi_raw(cplx w) const;

  // Samples of W': points of the chart domain at distance > margin from its
  // boundary, within a bounded window, on which |G(w) - w - 1| < 1/4.
  std::vector<cplx> interior_samples(std::size_t count, std::uint64_t seed, double margin = 2.0,
                                     double window = 40.0) const;

 private:
  FatouChart() = default;
  std::optional<EntireMap> map_;
  std::optional<ParabolicGerm> germ_;
  PetalKind kind_ = PetalKind::Repelling;
  cplx petal_direction_;
  double rho_ = 1;
  double beta_ = 0;
  std::size_t truncation_ = 4000;
  cplx base_point_;
  cplx base_value_ = 0;
};

struct AbelReport {
  std::size_t samples = 0;
  double max_residual = 0;
  bool passed = true;
  std::optional<cplx> witness;
};
AbelReport abel_residuals(const FatouChart& chart, std::span<const cplx> points, double tol = 1e-6);

inline constexpr double kPhiDerivativeLower = 9.0 / 80.0;
inline constexpr double kPhiDerivativeUpper = 169.0 / 48.0;

struct DerivativeBoundReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_modulus = 0;
  double max_modulus = 0;
  bool passed = true;
  std::optional<cplx> witness;
};
// |Phi'| against (9/80, 169/48); every point must be at distance > 2 from
// the chart boundary (PreconditionViolated otherwise).
DerivativeBoundReport phi_derivative_bounds(const FatouChart& chart, std::span<const cplx> points);

inline constexpr double kCascadeC2 = 27.0 / 845.0;

struct CascadeReport {
  std::size_t steps = 0;
  double log_derivative = 0;      // log |(f^n)'(z)|
  // Smallest log-margin over all prefixes of each bound; positive = holds.
  double derivative_margin = 0;   // vs C2 |u_0|^{-(1+p)} |u_n|^{1+p}
  double modulus_margin = 0;      // vs |u_0| < C1 n^{-1/p}
  double weighted_margin = 0;     // vs omega-weighted K |u_n|^l n^tau
  bool monotone_escape = true;
  bool passed = true;
};

// Orbit of z under f for n steps, which must stay in the thin repelling
// sector of the given radius (OrbitLeftSector otherwise). s is the metric
// exponent used in the omega-weighted bound.
CascadeReport cascade_estimates(const EntireMap& f, const ParabolicGerm& germ, cplx z,
                                std::size_t n, double sector_radius, double s);

// Number of steps the orbit of z stays inside the thin sector, capped.
std::size_t steps_in_thin_sector(const EntireMap& f, const ParabolicGerm& germ, std::size_t index,
                                 cplx z, double sector_radius, std::size_t cap);

}  // namespace gfdyn
