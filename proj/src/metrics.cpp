#include "gfdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "gfdyn/sampling.hpp"

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Disc {
  cplx center;
  double radius;
};

// Largest disc of the form B(vertex + t dir, rho) inside the sector.
Disc inscribed_disc(const SectorSpec& sec) {
  cplx dir = sec.direction / std::abs(sec.direction);
  double half = sec.opening / 2;
  double t, rho;
  if (half >= kPi / 2) {
    t = sec.radius / 2;
    rho = t;
  } else {
    double sn = std::sin(half);
    t = sec.radius / (1 + sn);
    rho = t * sn;
  }
  return {sec.vertex + t * dir, rho};
}

// Density of the complement of a closed disc, exact.
double disc_complement_density(double dist_to_center, double radius) {
  return 1.0 / (dist_to_center * std::log(dist_to_center / radius));
}

}  // namespace

std::vector<cplx> MetricConfig::par_points() const {
  std::vector<cplx> out;
  for (const auto& g : germs) out.push_back(g.zeta);
  return out;
}

RamificationData ramification_data(const EntireMap& f) {
  const auto par = parabolic_points(f);
  if (par.empty()) throw DynamicsError(ErrorKind::UnsupportedMap, "map has no parabolic points");
  RamificationData out;
  auto lands_on = [&](cplx z) -> std::optional<cplx> {
    for (cplx zeta : par)
      if (std::abs(z - zeta) < 1e-9 * std::max(1.0, std::abs(zeta))) return zeta;
    return std::nullopt;
  };

  // Critical points that map straight onto a parabolic point.
  for (cplx w : f.critical_points(64.0)) {
    if (lands_on(f.eval(w)) && !lands_on(w))
      out.contributions.push_back({w, f.local_degree(w), 1});
  }

  // Postsingular points in the Julia set that land exactly on Par.
  for (const auto& sv : f.singular_values()) {
    if (lands_on(sv.value)) {
      if (sv.kind == SingularKind::Asymptotic) out.asymptotic_value_in_julia = true;
      continue;
    }
    cplx prev = sv.value;
    cplx z = sv.value;
    for (int j = 1; j <= 64; ++j) {
      z = f.eval(z);
      if (overflowed(z)) break;
      if (lands_on(z)) {
        if (f.is_exponential())
          throw DynamicsError(ErrorKind::UnsupportedMap,
                              "asymptotic value orbit lands on a parabolic point", sv.value);
        if (sv.kind == SingularKind::Asymptotic) out.asymptotic_value_in_julia = true;
        // prev is a preimage of Par inside P(f); its own preimages include
        // the critical point when prev is the critical value itself.
        int lcm_deg = (j == 1 && sv.kind == SingularKind::Critical) ? 2 : 1;
        bool seen = false;
        for (auto& c : out.contributions)
          if (std::abs(c.point - prev) < 1e-9) {
            c.weight = std::lcm(c.weight, 2 * lcm_deg);
            seen = true;
          }
        if (!seen) out.contributions.push_back({prev, f.local_degree(prev), 2 * lcm_deg});
        break;
      }
      prev = z;
    }
  }
  int n = 1;
  for (const auto& c : out.contributions) n = std::lcm(n, c.degree * c.weight);
  out.n_sigma = n;
  out.s = 1.0 - 1.0 / (2.0 * n);
  if (out.asymptotic_value_in_julia)
    out.note = "asymptotic value in the Julia set: not strongly geometrically finite";
  return out;
}

MetricConfig build_metric_config(const EntireMap& f, const MetricBuildOptions& opt) {
  auto par = parabolic_points(f);
  if (par.empty()) throw DynamicsError(ErrorKind::UnsupportedMap, "map has no parabolic points");
  MetricConfig cfg{f, {}, 1, 0.5, 0, 0, opt.comparison_disc_radius, {}};
  double r = opt.radius_cap;
  for (cplx zeta : par) {
    cfg.germs.push_back(fit_germ(f, zeta));
    r = std::min(r, validated_radius(f, cfg.germs.back(), opt.radius_samples, opt.radius_cap, opt.seed));
  }
  cfg.petal_radius = r;
  auto ram = ramification_data(f);
  cfg.n_sigma = ram.n_sigma;
  cfg.s = ram.s;
  for (const auto& g : cfg.germs)
    for (std::size_t j = 0; j < g.attracting.size(); ++j)
      cfg.petal_domains.push_back(attracting_sector(g, j, r));
  cfg.eps_sigma = select_eps_sigma(cfg, r / 2, opt.eps_samples, opt.seed);
  return cfg;
}

double parabolic_distance(const MetricConfig& cfg, cplx z) {
  double d = kInf;
  for (const auto& g : cfg.germs) d = std::min(d, std::abs(z - g.zeta));
  return d;
}

bool in_petal_domains(const MetricConfig& cfg, cplx z) {
  for (const auto& sec : cfg.petal_domains) {
    // closed sector: boundary rays belong to D'
    cplx u = z - sec.vertex;
    double r = std::abs(u);
    if (r > 0 && r <= sec.radius && std::abs(angle_between(sec.direction, u)) <= sec.opening / 2)
      return true;
  }
  return false;
}

double omega_density(const MetricConfig& cfg, cplx z) {
  double d = parabolic_distance(cfg, z);
  if (!(d > 0)) throw DynamicsError(ErrorKind::AtParabolic, "omega is singular at Par", z);
  return std::pow(d, -cfg.s);
}

DensityBracket comparison_densities(const MetricConfig& cfg, cplx z) {
  const double R = cfg.comparison_disc_radius;
  const double mod = std::abs(z);
  if (!(R > 0) || !(mod > R))
    throw DynamicsError(ErrorKind::OutsideComparisonRegion, "upper bound needs |z| > R", z);
  DensityBracket b;
  b.upper = 1.0 / (mod * std::log(mod / R));
  for (const auto& sec : cfg.petal_domains) {
    Disc d = inscribed_disc(sec);
    double dist = std::abs(z - d.center);
    if (dist > d.radius) b.lower = std::max(b.lower, disc_complement_density(dist, d.radius));
  }
  return b;
}

SigmaValue sigma_density(const MetricConfig& cfg, cplx z) {
  double d = parabolic_distance(cfg, z);
  if (!(d > 0)) throw DynamicsError(ErrorKind::AtParabolic, "sigma is singular at Par", z);
  if (in_petal_domains(cfg, z))
    throw DynamicsError(ErrorKind::OutsideMetricDomain, "point lies in the petal domains", z);
  SigmaValue v;
  if (d < cfg.eps_sigma) {
    v.near = true;
    v.lower = v.upper = std::pow(d, -cfg.s);
    return v;
  }
  for (const auto& sec : cfg.petal_domains) {
    Disc disc = inscribed_disc(sec);
    double dist = std::abs(z - disc.center);
    if (dist > disc.radius) v.lower = std::max(v.lower, disc_complement_density(dist, disc.radius));
  }
  const double R = cfg.comparison_disc_radius;
  const double mod = std::abs(z);
  v.upper = (R > 0 && mod > R) ? 1.0 / (mod * std::log(mod / R)) : kInf;
  return v;
}

ExpansionFactor expansion_factor(const MetricConfig& cfg, cplx z) {
  cplx fz = cfg.map.eval(z);
  if (overflowed(fz)) throw DynamicsError(ErrorKind::Overflow, "f(z) overflows", z);
  SigmaValue src = sigma_density(cfg, z);
  SigmaValue img = sigma_density(cfg, fz);
  double df = std::abs(cfg.map.derivative(z));
  ExpansionFactor e;
  e.source_near = src.near;
  e.image_near = img.near;
  e.conservative = src.upper == kInf ? 0.0 : df * img.lower / src.upper;
  e.optimistic = src.lower > 0 ? df * img.upper / src.lower : kInf;
  return e;
}

SuiteReport near_parabolic_suite(const MetricConfig& cfg, double eps, std::size_t samples,
                                 std::uint64_t seed) {
  SuiteReport rep;
  rep.min_conservative = rep.min_optimistic = kInf;
  std::vector<SectorSpec> sectors;
  for (const auto& g : cfg.germs)
    for (std::size_t j = 0; j < g.repelling.size(); ++j) sectors.push_back(thin_repelling_sector(g, j, eps));
  if (sectors.empty()) return rep;
  const std::size_t per = (samples + sectors.size() - 1) / sectors.size();
  const double log_span = std::log(1e4);
  LowDiscrepancy2D seq(seed);
  for (const auto& sec : sectors) {
    const double base = std::arg(sec.direction);
    for (std::size_t n = 0; n < per; ++n) {
      auto [s1, s2] = seq(n);
      double r = eps * std::exp(-s1 * log_span);
      double theta = base + (s2 - 0.5) * sec.opening * (1 - 1e-9);
      cplx u = std::polar(r, theta);
      cplx gu = cfg.map.displacement(sec.vertex, u);
      double factor = std::abs(cfg.map.derivative(sec.vertex + u)) * std::pow(r / std::abs(gu), cfg.s);
      ++rep.samples;
      rep.min_conservative = std::min(rep.min_conservative, factor);
      rep.min_optimistic = std::min(rep.min_optimistic, factor);
      if (!(factor > 1)) {
        ++rep.failures;
        ++rep.optimistic_failures;
        if (!rep.witness) rep.witness = sec.vertex + u;
      }
    }
  }
  return rep;
}

SuiteReport far_regime_suite(const MetricConfig& cfg, std::size_t samples, std::uint64_t seed,
                             double outer_factor) {
  SuiteReport rep;
  rep.min_conservative = rep.min_optimistic = kInf;
  const double R = cfg.comparison_disc_radius;
  if (!(R > 0)) throw DynamicsError(ErrorKind::PreconditionViolated, "comparison radius not set");
  const double log_span = std::log(outer_factor);
  LowDiscrepancy2D seq(seed);
  for (std::size_t n = 0; rep.samples < samples && n < 100 * samples; ++n) {
    auto [s1, s2] = seq(n);
    double r = R * std::exp(s1 * log_span);
    cplx z = std::polar(r, 2 * kPi * s2);
    cplx fz = cfg.map.eval(z);
    if (overflowed(fz) || !(std::abs(fz) > R) || !(r > R)) continue;
    if (parabolic_distance(cfg, z) < cfg.eps_sigma) continue;
    ExpansionFactor e = expansion_factor(cfg, z);
    ++rep.samples;
    rep.min_conservative = std::min(rep.min_conservative, e.conservative);
    rep.min_optimistic = std::min(rep.min_optimistic, e.optimistic);
    if (!(e.conservative > 1)) ++rep.failures;
    if (!(e.optimistic > 1)) {
      ++rep.optimistic_failures;
      if (!rep.witness) rep.witness = z;
    }
  }
  return rep;
}

double select_eps_sigma(const MetricConfig& cfg, double cap, std::size_t samples, std::uint64_t seed) {
  auto ok = [&](double eps) { return near_parabolic_suite(cfg, eps, samples, seed).passed(); };
  if (ok(cap)) return cap;
  double hi = cap, lo = cap / 2;
  int halvings = 0;
  while (!ok(lo)) {
    hi = lo;
    lo /= 2;
    if (++halvings > 40)
      throw DynamicsError(ErrorKind::BoundViolated, "no admissible eps_sigma found");
  }
  for (int it = 0; it < 30; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace gfdyn
