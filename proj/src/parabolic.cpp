#include "gfdyn/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gfdyn/sampling.hpp"

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

cplx polar_root(double modulus, double angle) { return std::polar(modulus, angle); }

bool is_multiple_fixed_point(const EntireMap& f, cplx z, double tol) {
  return std::abs(f.eval(z) - z) <= tol * std::max(1.0, std::abs(z)) &&
         std::abs(f.derivative(z) - 1.0) <= tol;
}

}  // namespace

std::vector<cplx> parabolic_points(const EntireMap& f, double tol) {
  std::vector<cplx> candidates;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          // f' = 1 forces A e^{Bz} = 1/B, and then f(z) = z forces z = 1/B + C.
          candidates.push_back(1.0 / k.B + k.C);
        } else {
          candidates.push_back(0.0);
        }
      },
      f.kernel());
  std::vector<cplx> out;
  for (cplx z : candidates)
    if (is_multiple_fixed_point(f, z, tol)) out.push_back(z);
  return out;
}

ParabolicGerm fit_germ(const EntireMap& f, cplx zeta, double tol) {
  constexpr int kOrder = 16;
  auto c = f.taylor(zeta, kOrder);
  if (std::abs(c[0] - zeta) > tol * std::max(1.0, std::abs(zeta)))
    throw DynamicsError(ErrorKind::NotParabolic, "point is not fixed", zeta);
  if (std::abs(c[1] - 1.0) > tol)
    throw DynamicsError(ErrorKind::NotParabolic, "multiplier is not 1", zeta);
  ParabolicGerm g;
  g.zeta = zeta;
  g.coefficients = c;
  for (int k = 2; k <= kOrder; ++k) {
    if (std::abs(c[static_cast<std::size_t>(k)]) > 1e-12) {
      g.p = k - 1;
      g.a = c[static_cast<std::size_t>(k)];
      break;
    }
  }
  if (g.p == 0) throw DynamicsError(ErrorKind::DegenerateSeries, "no nonzero coefficient found", zeta);
  const double p = g.p;
  const double mod = std::pow(p * std::abs(g.a), -1.0 / p);
  const double arg_a = std::arg(g.a);
  for (int j = 0; j < g.p; ++j) {
    g.repelling.push_back(polar_root(mod, (-arg_a + 2 * kPi * j) / p));
    g.attracting.push_back(polar_root(mod, (kPi - arg_a + 2 * kPi * j) / p));
  }
  return g;
}

std::vector<cplx> taylor_by_cauchy(const EntireMap& f, cplx z0, int order, double radius, int nodes) {
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1, 0.0);
  for (int j = 0; j < nodes; ++j) {
    double theta = 2 * kPi * j / nodes;
    cplx val = f.eval(z0 + std::polar(radius, theta));
    for (int k = 0; k <= order; ++k) c[static_cast<std::size_t>(k)] += val * std::polar(1.0, -k * theta);
  }
  for (int k = 0; k <= order; ++k) c[static_cast<std::size_t>(k)] /= nodes * std::pow(radius, k);
  return c;
}

double angle_between(cplx v, cplx w) { return std::arg(w * std::conj(v)); }

bool SectorSpec::contains(cplx z) const {
  cplx u = z - vertex;
  double r = std::abs(u);
  if (!(r > 0) || !(r < radius)) return false;
  return std::abs(angle_between(direction, u)) < opening / 2;
}

SectorSpec thin_repelling_sector(const ParabolicGerm& germ, std::size_t index, double radius) {
  return {germ.zeta, germ.repelling.at(index), kPi / (4 * germ.p), radius};
}

SectorSpec attracting_sector(const ParabolicGerm& germ, std::size_t index, double radius, double opening) {
  if (opening <= 0) opening = 7 * kPi / (4 * germ.p);
  return {germ.zeta, germ.attracting.at(index), opening, radius};
}

void InequalityReport::raise_if_failed() const {
  if (!passed)
    throw DynamicsError(ErrorKind::InequalityViolated, failed_check, witness);
}

InequalityReport thin_sector_inequalities(const EntireMap& f, const ParabolicGerm& germ, double r0,
                                          std::size_t samples, std::uint64_t seed) {
  InequalityReport rep;
  rep.radius = r0;
  rep.min_modulus_margin = kInf;
  rep.min_derivative_margin = kInf;
  const double r_lo = std::max(1e-6, r0 * 1e-4);
  const double log_span = std::log(r0 / r_lo);
  const double alpha = kPi / (4 * germ.p);
  LowDiscrepancy2D seq(seed);
  std::vector<SectorSpec> sectors;
  for (std::size_t j = 0; j < germ.repelling.size(); ++j)
    sectors.push_back(thin_repelling_sector(germ, j, r0));

  auto fail = [&](cplx z, const char* what) {
    ++rep.violations;
    if (rep.passed) {
      rep.passed = false;
      rep.witness = z;
      rep.failed_check = what;
    }
  };

  for (std::size_t j = 0; j < sectors.size(); ++j) {
    const double base_arg = std::arg(germ.repelling[j]);
    for (std::size_t n = 0; n < samples; ++n) {
      auto [s1, s2] = seq(n);
      double r = r_lo * std::exp(s1 * log_span);
      double theta = base_arg + (s2 - 0.5) * alpha * (1 - 1e-9);
      cplx u = std::polar(r, theta);
      cplx z = germ.zeta + u;
      cplx gu = f.displacement(germ.zeta, u);
      double ratio = std::abs(gu) / r;
      double deriv = std::abs(f.derivative(z));
      double m1 = ratio - 1;
      double m2 = deriv / ratio - 1;
      rep.min_modulus_margin = std::min(rep.min_modulus_margin, m1);
      rep.min_derivative_margin = std::min(rep.min_derivative_margin, m2);
      ++rep.samples;
      if (!(m1 > 0)) {
        fail(z, "|g(z)-zeta| > |z-zeta| fails");
        continue;
      }
      if (!(m2 > 0)) {
        fail(z, "|g'(z)| > |g(z)-zeta|/|z-zeta| fails");
        continue;
      }
      for (std::size_t k = 0; k < sectors.size(); ++k) {
        if (k != j && sectors[k].contains(germ.zeta + gu)) {
          fail(z, "sector trapping fails");
          break;
        }
      }
    }
  }
  return rep;
}

double validated_radius(const EntireMap& f, const ParabolicGerm& germ, std::size_t samples,
                        double cap, std::uint64_t seed) {
  auto ok = [&](double r) { return thin_sector_inequalities(f, germ, r, samples, seed).passed; };
  if (ok(cap)) return cap;
  double hi = cap, lo = cap / 2;
  int halvings = 0;
  while (!ok(lo)) {
    hi = lo;
    lo /= 2;
    if (++halvings > 40)
      throw DynamicsError(ErrorKind::InequalityViolated, "no validated radius found", germ.zeta);
  }
  for (int it = 0; it < 30; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------- Fatou chart

FatouChart FatouChart::from_germ(const EntireMap& f, const ParabolicGerm& germ, PetalKind kind,
                                 std::size_t branch, double radius, std::size_t truncation) {
  FatouChart c;
  c.map_ = f;
  c.germ_ = germ;
  c.kind_ = kind;
  c.petal_direction_ = kind == PetalKind::Repelling ? germ.repelling.at(branch) : germ.attracting.at(branch);
  c.truncation_ = truncation;
  // The w^{-1} coefficient of G is available in closed form when the
  // coefficients between orders p+2 and 2p vanish (always for p = 1).
  const int p = germ.p;
  bool clean = true;
  for (int k = p + 2; k <= 2 * p; ++k)
    if (std::abs(germ.coefficients[static_cast<std::size_t>(k)]) > 1e-12) clean = false;
  if (clean) {
    cplx c2p1 = germ.coefficients[static_cast<std::size_t>(2 * p + 1)];
    c.beta_ = std::real((p + 1.0) / (2.0 * p) - c2p1 / (static_cast<double>(p) * germ.a * germ.a));
    double beta_im =
        std::imag((p + 1.0) / (2.0 * p) - c2p1 / (static_cast<double>(p) * germ.a * germ.a));
    // beta is real for the real-symmetric examples; a complex value would
    // need a complex log correction which this chart does not carry.
    if (std::abs(beta_im) > 1e-12) c.beta_ = 0;
  }
  double rho_radius = 1.0 / (p * std::abs(germ.a) * std::pow(radius, p));
  c.rho_ = std::max({rho_radius, 8 * std::abs(c.beta_), 2.0});
  c.base_point_ = kind == PetalKind::Repelling ? cplx(-(c.rho_ + 2), 0) : cplx(c.rho_ + 2, 0);
  c.base_value_ = 0;
  c.base_value_ = c.phi_raw(c.base_point_);
  return c;
}

FatouChart FatouChart::translation(PetalKind kind, double rho) {
  FatouChart c;
  c.kind_ = kind;
  c.rho_ = rho;
  c.truncation_ = 64;
  c.base_point_ = kind == PetalKind::Repelling ? cplx(-(rho + 2), 0) : cplx(rho + 2, 0);
  c.base_value_ = c.phi_raw(c.base_point_);
  return c;
}

bool FatouChart::in_domain(cplx w, double margin) const {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
  return kind_ == PetalKind::Repelling ? w.real() < -rho_ - margin : w.real() > rho_ + margin;
}

namespace {

cplx ipow(cplx u, int p) {
  cplx r = 1.0;
  for (int i = 0; i < p; ++i) r *= u;
  return r;
}

// Local inverse of u -> f(zeta + u) - zeta near 0: two terms of the inverse
// series, then Newton. Convergence is quadratic, so a step below 1e-9 |x|
// leaves an error far below rounding and needs no confirming evaluation.
cplx local_inverse(const EntireMap& f, const ParabolicGerm& g, cplx u) {
  const int p = g.p;
  const cplx b = g.coefficients.size() > static_cast<std::size_t>(p + 2) ? g.coefficients[p + 2] : cplx(0);
  const cplx up1 = ipow(u, p + 1);
  cplx x = u - g.a * up1 - b * up1 * u + static_cast<double>(p + 1) * g.a * g.a * up1 * ipow(u, p);
  for (int it = 0; it < 30; ++it) {
    cplx F = f.displacement(g.zeta, x) - u;
    if (std::abs(F) <= 1e-17 * std::abs(u)) break;
    cplx step = F / f.derivative(g.zeta + x);
    x -= step;
    if (std::abs(step) <= 1e-9 * std::abs(x)) break;
  }
  return x;
}

}  // namespace

cplx FatouChart::kappa(cplx z) const {
  if (!germ_) return z;
  return -1.0 / (static_cast<double>(germ_->p) * germ_->a * ipow(z - germ_->zeta, germ_->p));
}

cplx FatouChart::kappa_inverse(cplx w) const {
  if (!germ_) return w;
  const int p = germ_->p;
  cplx root = std::pow(-1.0 / (static_cast<double>(p) * germ_->a * w), 1.0 / p);
  cplx best = root;
  double best_angle = kInf;
  for (int j = 0; j < p; ++j) {
    cplx cand = root * std::polar(1.0, 2 * kPi * j / p);
    double ang = std::abs(angle_between(petal_direction_, cand));
    if (ang < best_angle) {
      best_angle = ang;
      best = cand;
    }
  }
  return germ_->zeta + best;
}

cplx FatouChart::G(cplx w) const {
  if (!germ_) return w + 1.0;
  cplx u = kappa_inverse(w) - germ_->zeta;
  return kappa(germ_->zeta + map_->displacement(germ_->zeta, u));
}

cplx FatouChart::G_inverse(cplx w) const {
  if (!germ_) return w - 1.0;
  cplx u = kappa_inverse(w) - germ_->zeta;
  return kappa(germ_->zeta + local_inverse(*map_, *germ_, u));
}

cplx FatouChart::phi_raw(cplx w) const {
  if (!in_domain(w))
    throw DynamicsError(ErrorKind::OutOfChart, "point outside the validated chart domain", w);
  const double n = static_cast<double>(truncation_);
  const double sign = kind_ == PetalKind::Repelling ? -1.0 : 1.0;
  cplx x;
  if (!germ_) {
    x = w + sign * n;
  } else {
    // The orbit stays in one petal, so iterate in the local coordinate and
    // convert once at the end.
    cplx u = kappa_inverse(w) - germ_->zeta;
    if (kind_ == PetalKind::Repelling) {
      for (std::size_t i = 0; i < truncation_; ++i) u = local_inverse(*map_, *germ_, u);
    } else {
      for (std::size_t i = 0; i < truncation_; ++i) u = map_->displacement(germ_->zeta, u);
    }
    x = kappa(germ_->zeta + u);
  }
  if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
    throw DynamicsError(ErrorKind::NoConvergence, "chart orbit diverged", w);
  if (kind_ == PetalKind::Repelling) return x + n - beta_ * std::log(-x);
  return x - n - beta_ * std::log(x);
}

cplx FatouChart::phi(cplx w) const { return phi_raw(w) - base_value_; }

std::vector<cplx> FatouChart::interior_samples(std::size_t count, std::uint64_t seed, double margin,
                                               double window) const {
  std::vector<cplx> out;
  LowDiscrepancy2D seq(seed);
  const double edge = rho_ + margin + 1e-9;
  for (std::size_t n = 0; out.size() < count && n < 50 * count + 100; ++n) {
    auto [s1, s2] = seq(n);
    double re = edge + s1 * window;
    if (kind_ == PetalKind::Repelling) re = -re;
    cplx w(re, (2 * s2 - 1) * window);
    if (std::abs(G(w) - w - 1.0) < 0.25) out.push_back(w);
  }
  return out;
}

AbelReport abel_residuals(const FatouChart& chart, std::span<const cplx> points, double tol) {
  AbelReport rep;
  for (cplx w : points) {
    double r = std::abs(chart.phi(chart.G(w)) - chart.phi(w) - 1.0);
    ++rep.samples;
    rep.max_residual = std::isfinite(r) ? std::max(rep.max_residual, r) : kInf;
    if (!(r < tol) && rep.passed) {
      rep.passed = false;
      rep.witness = w;
    }
  }
  return rep;
}

DerivativeBoundReport phi_derivative_bounds(const FatouChart& chart, std::span<const cplx> points) {
  DerivativeBoundReport rep;
  rep.min_modulus = kInf;
  for (cplx w : points)
    if (!chart.in_domain(w, 2.0))
      throw DynamicsError(ErrorKind::PreconditionViolated,
                          "sample within distance 2 of the chart boundary", w);
  constexpr double h = 1e-2;
  for (cplx w : points) {
    double d = std::abs((chart.phi(w + h) - chart.phi(w - h)) / (2 * h));
    ++rep.samples;
    rep.min_modulus = std::min(rep.min_modulus, d);
    rep.max_modulus = std::max(rep.max_modulus, d);
    if (!(d > kPhiDerivativeLower && d < kPhiDerivativeUpper)) {
      if (rep.passed) rep.witness = w;
      rep.passed = false;
      ++rep.violations;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- cascades

namespace {

std::optional<std::size_t> thin_sector_index(const ParabolicGerm& germ, cplx z, double radius) {
  for (std::size_t j = 0; j < germ.repelling.size(); ++j)
    if (thin_repelling_sector(germ, j, radius).contains(z)) return j;
  return std::nullopt;
}

}  // namespace

std::size_t steps_in_thin_sector(const EntireMap& f, const ParabolicGerm& germ, std::size_t index,
                                 cplx z, double sector_radius, std::size_t cap) {
  const SectorSpec sec = thin_repelling_sector(germ, index, sector_radius);
  if (!sec.contains(z)) return 0;
  cplx u = z - germ.zeta;
  std::size_t n = 0;
  while (n < cap) {
    cplx next = f.displacement(germ.zeta, u);
    if (!sec.contains(germ.zeta + next)) break;
    u = next;
    ++n;
  }
  return n;
}

CascadeReport cascade_estimates(const EntireMap& f, const ParabolicGerm& germ, cplx z, std::size_t n,
                                double sector_radius, double s) {
  auto idx = thin_sector_index(germ, z, sector_radius);
  if (!idx) throw DynamicsError(ErrorKind::OrbitLeftSector, "start point not in a thin sector", z);
  const SectorSpec sec = thin_repelling_sector(germ, *idx, sector_radius);
  const double p = germ.p;
  const double C1 = std::pow(0.75 * p * std::abs(germ.a), -1.0 / p);
  const double ell = p + 1 - s;
  const double tau = 1 + (1 - s) / p;
  const double logK = std::log(kCascadeC2) - ell * std::log(C1);

  CascadeReport rep;
  rep.steps = n;
  rep.derivative_margin = kInf;
  rep.modulus_margin = kInf;
  rep.weighted_margin = kInf;
  cplx u = z - germ.zeta;
  const double log_u0 = std::log(std::abs(u));
  double logD = 0;
  double prev_mod = std::abs(u);
  for (std::size_t k = 1; k <= n; ++k) {
    logD += std::log(std::abs(f.derivative(germ.zeta + u)));
    u = f.displacement(germ.zeta, u);
    if (!sec.contains(germ.zeta + u))
      throw DynamicsError(ErrorKind::OrbitLeftSector, "orbit left the thin sector", germ.zeta + u);
    const double mod = std::abs(u);
    if (!(mod > prev_mod)) rep.monotone_escape = false;
    prev_mod = mod;
    const double log_un = std::log(mod);
    const double log_k = std::log(static_cast<double>(k));
    rep.derivative_margin =
        std::min(rep.derivative_margin, logD - (std::log(kCascadeC2) - (1 + p) * log_u0 + (1 + p) * log_un));
    rep.modulus_margin = std::min(rep.modulus_margin, std::log(C1) - log_k / p - log_u0);
    rep.weighted_margin = std::min(
        rep.weighted_margin, s * (log_u0 - log_un) + logD - (logK + ell * log_un + tau * log_k));
  }
  rep.log_derivative = logD;
  rep.passed = rep.derivative_margin > 0 && rep.modulus_margin > 0 && rep.weighted_margin > 0 &&
               rep.monotone_escape;
  return rep;
}

}  // namespace gfdyn
