#include "gfdyn/semiconj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gfdyn/sampling.hpp"

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double circle_max(const EntireMap& f, double radius, std::size_t n) {
  double m = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = std::abs(f.eval(std::polar(radius, 2 * kPi * static_cast<double>(j) / n)));
    if (!std::isfinite(v)) return kInf;
    m = std::max(m, v);
  }
  return m;
}

std::vector<cplx> segment(cplx a, cplx b, std::size_t points) {
  points = std::max<std::size_t>(points, 2);
  std::vector<cplx> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = a + (b - a) * (static_cast<double>(i) / static_cast<double>(points - 1));
  out.back() = b;
  return out;
}

// Weight used for sigma-lengths: the exact density in the omega regime,
// otherwise the upper comparison bound, falling back to the lower one.
double length_weight(const MetricConfig& cfg, cplx z) {
  try {
    SigmaValue v = sigma_density(cfg, z);
    if (v.near || std::isfinite(v.upper)) return v.upper;
    return v.lower;
  } catch (const DynamicsError&) {
    double d = parabolic_distance(cfg, z);
    return d > 0 ? std::pow(d, -cfg.s) : 0.0;
  }
}

}  // namespace

double max_modulus_on_circle(const EntireMap& f, double radius, std::size_t* grid_used) {
  std::size_t n = 256;
  double m = circle_max(f, radius, n);
  while (n < (1u << 22)) {
    double m2 = circle_max(f, radius, 2 * n);
    n *= 2;
    bool stable = std::abs(m2 - m) <= 1e-9 * m2;
    m = m2;
    if (stable) break;
  }
  if (grid_used) *grid_used = n;
  return m;
}

double parabolic_floor(const MetricConfig& cfg) {
  double r = 0;
  for (const auto& g : cfg.germs) r = std::max(r, std::abs(g.zeta) + std::max(cfg.petal_radius, cfg.eps_sigma));
  return r;
}

RescalingChoice choose_rescaling(const EntireMap& f, double safety, double floor_radius,
                                 std::size_t orbit_steps) {
  if (!(safety > 1)) throw DynamicsError(ErrorKind::ConfigError, "safety factor must exceed 1");
  RescalingChoice c;
  c.safety = safety;
  c.floor_radius = floor_radius;
  for (const auto& sv : f.singular_values()) {
    cplx z = sv.value;
    for (std::size_t i = 0; i <= orbit_steps; ++i) {
      if (overflowed(z) || std::abs(z) > 1e8)
        throw DynamicsError(ErrorKind::UnboundedPostsingular, "singular orbit leaves every bounded set",
                            sv.value);
      c.max_postsingular = std::max(c.max_postsingular, std::abs(z));
      z = f.eval(z);
    }
  }
  // B(0, K/2) has to hold the postsingular set and the parabolic
  // neighbourhoods; K > 2 as well.
  c.K = safety * std::max({2 * c.max_postsingular, 2 * floor_radius, 2.0});
  c.max_on_circle = max_modulus_on_circle(f, c.K, &c.grid_points);
  if (!std::isfinite(c.max_on_circle))
    throw DynamicsError(ErrorKind::Overflow, "max modulus on |z| = K overflows");
  c.L = safety * c.max_on_circle;
  c.lambda = c.K / c.L;
  return c;
}

EntireMap rescaled_map(const EntireMap& f, const RescalingChoice& choice) {
  return EntireMap::rescaled(f, choice.lambda);
}

DisjointTypeReport verify_disjoint_type(const EntireMap& f, const RescalingChoice& choice, double min_margin) {
  EntireMap g = rescaled_map(f, choice);
  DisjointTypeReport rep;
  rep.max_on_circle = max_modulus_on_circle(g, choice.L);
  rep.margin = choice.L / rep.max_on_circle;
  if (!(rep.margin > 1 + min_margin))
    throw DynamicsError(ErrorKind::MarginTooSmall, "g does not map B(0, L) well inside itself");
  cplx z = 0;
  bool converged = false;
  for (int i = 0; i < 100000; ++i) {
    cplx next = g.eval(z);
    if (std::abs(next - z) <= 1e-14 * std::max(1.0, std::abs(z))) {
      z = next;
      converged = true;
      break;
    }
    z = next;
  }
  rep.attracting_fixed_point = z;
  rep.multiplier = std::abs(g.derivative(z));
  if (!converged || !(rep.multiplier < 1))
    throw DynamicsError(ErrorKind::MarginTooSmall, "no attracting fixed point found for g", z);
  return rep;
}

PullbackSample forward_sample(const EntireMap& g, cplx z, std::size_t depth) {
  PullbackSample s;
  s.start = z;
  auto orbit = iterate(g, z, depth, kOverflowModulus);
  s.orbit = orbit.points;
  if (orbit.escaped) s.orbit.pop_back();
  return s;
}

PullbackSample symbolic_sample(const EntireMap& g, const std::vector<long>& prefix,
                               const std::vector<long>& period, std::size_t depth, bool upper) {
  if (period.empty()) throw DynamicsError(ErrorKind::PreconditionViolated, "symbolic samples need a period");
  std::vector<long> cycle = period;
  cplx x0 = inverse_branch(g, 1.0, period[0]);
  if (std::holds_alternative<SineKernel>(g.kernel())) {
    // Sine branches are analytic on each open half-plane; odd branches swap
    // the two, so a period with an odd number of them closes up only after
    // two passes.
    x0 = cplx(0, upper ? 1.0 : -1.0);
    long odd = std::count_if(period.begin(), period.end(), [](long k) { return k % 2 != 0; });
    if (odd % 2) cycle.insert(cycle.end(), period.begin(), period.end());
  }
  const std::size_t q = cycle.size();
  cplx x = x0;
  bool converged = false;
  for (int it = 0; it < 20000 && !converged; ++it) {
    cplx y = x;
    for (std::size_t i = q; i-- > 0;) y = inverse_branch(g, y, cycle[i]);
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) break;
    converged = std::abs(y - x) <= 1e-15 * std::max(1.0, std::abs(y));
    x = y;
  }
  if (!converged) throw DynamicsError(ErrorKind::NoConvergence, "periodic tail did not converge");
  std::vector<cplx> cyc(q);
  cyc[0] = x;
  for (std::size_t i = q; i-- > 1;) cyc[i] = inverse_branch(g, i + 1 == q ? cyc[0] : cyc[i + 1], cycle[i]);
  const std::size_t m = prefix.size();
  std::vector<cplx> pre(m + 1);
  pre[m] = cyc[0];
  for (std::size_t i = m; i-- > 0;) pre[i] = inverse_branch(g, pre[i + 1], prefix[i]);
  PullbackSample s;
  s.orbit.resize(depth + 1);
  for (std::size_t j = 0; j <= depth; ++j) s.orbit[j] = j <= m ? pre[j] : cyc[(j - m) % q];
  s.start = s.orbit.front();
  std::string lbl;
  for (long k : prefix) lbl += std::to_string(k) + " ";
  lbl += "(";
  for (std::size_t i = 0; i < period.size(); ++i) lbl += (i ? " " : "") + std::to_string(period[i]);
  s.label = lbl + ")";
  if (std::holds_alternative<SineKernel>(g.kernel())) s.label += upper ? "+" : "-";
  return s;
}

PullbackResult run_pullback(const EntireMap& f, const RescalingChoice& choice,
                            const std::vector<PullbackSample>& samples, const PullbackOptions& opt,
                            const MetricConfig* metric) {
  PullbackResult result;
  result.levels = opt.levels;
  result.samples.resize(samples.size());
  const cplx lambda = choice.lambda;

  parallel_for(samples.size(), opt.threads, [&](std::size_t idx) {
    const PullbackSample& smp = samples[idx];
    SampleTrace& tr = result.samples[idx];
    tr.label = smp.label;
    tr.start = smp.start;
    tr.theta.push_back(smp.start);
    std::size_t levels = std::min(opt.levels, smp.orbit.size());
    for (std::size_t i = 0; i < levels; ++i) {
      if (!(std::abs(smp.orbit[i]) > choice.L)) {
        tr.dropped = true;
        tr.drop_reason = "g-orbit enters the closed disc of radius L";
        return;
      }
    }
    // th[i][j] = vartheta^j(z_i), needed for i + j <= levels.
    std::vector<std::vector<cplx>> th(levels + 1);
    for (std::size_t i = 0; i < levels; ++i) {
      th[i].assign(levels - i + 1, cplx(0));
      th[i][0] = smp.orbit[i];
    }
    try {
      for (std::size_t k = 1; k <= levels; ++k) {
        const std::size_t top = k - 1;
        th[top][1] = lambda * smp.orbit[top];
        std::vector<cplx> path = segment(smp.orbit[top], th[top][1], opt.segment_points);
        for (std::size_t j = 1; j + 1 <= k; ++j) {
          const std::size_t i = k - 1 - j;
          BranchContinuation lift = continue_branch(f, path, th[i][j], opt.continuation);
          path = std::move(lift.preimage_path);
          th[i][j + 1] = path.back();
          const cplx expected = th[i + 1][j];
          double res = std::abs(f.eval(th[i][j + 1]) - expected) / std::max(1.0, std::abs(expected));
          tr.max_residual = std::max(tr.max_residual, res);
        }
        tr.theta.push_back(th[0][k]);
        tr.step_lengths.push_back(std::abs(th[0][k] - th[0][k - 1]));
        if (metric) {
          double len = 0;
          for (std::size_t v = 0; v + 1 < path.size(); ++v)
            len += std::abs(path[v + 1] - path[v]) * length_weight(*metric, 0.5 * (path[v] + path[v + 1]));
          tr.sigma_lengths.push_back(len);
        }
      }
    } catch (const DynamicsError& e) {
      tr.dropped = true;
      tr.drop_reason = e.what();
      return;
    }
    if (tr.max_residual > opt.residual_tolerance) {
      tr.dropped = true;
      tr.drop_reason = "functional relation residual above tolerance";
      return;
    }
    if (levels < opt.levels) {
      tr.dropped = true;
      tr.drop_reason = "g-orbit overflows before the requested depth";
    }
  });

  for (const auto& tr : result.samples) {
    if (tr.dropped) ++result.dropped;
    result.max_residual = std::max(result.max_residual, tr.max_residual);
  }
  return result;
}

ConvergenceFit fit_convergence(const SampleTrace& trace, std::size_t k_min) {
  ConvergenceFit fit;
  const std::size_t K = trace.step_lengths.size();
  if (K < 3 && !trace.dropped)
    throw DynamicsError(ErrorKind::PreconditionViolated, "a rate fit needs at least 3 levels");
  if (k_min == 0) k_min = std::max<std::size_t>(3, K / 4);
  std::vector<double> lk, kk, le, ls;
  bool exhausted = false;
  for (std::size_t k = std::max<std::size_t>(k_min, 1); k < K; ++k) {
    double e = trace.step_lengths[k];
    if (!(e > 1e-300)) {
      exhausted = true;
      break;
    }
    lk.push_back(std::log(static_cast<double>(k)));
    kk.push_back(static_cast<double>(k));
    le.push_back(std::log(e));
    if (k < trace.sigma_lengths.size() && trace.sigma_lengths[k] > 0)
      ls.push_back(std::log(trace.sigma_lengths[k]));
  }
  if (lk.size() < 4) {
    fit.far_regime = exhausted;
    return fit;
  }
  fit.usable = true;
  LinearFit power = fit_line(lk, le);
  LinearFit geometric = fit_line(kk, le);
  fit.tau_euclid = -power.slope;
  fit.geometric_ratio = std::exp(geometric.slope);
  fit.tau_sigma = ls.size() == lk.size() ? -fit_line(lk, ls).slope : fit.tau_euclid;
  fit.far_regime = exhausted || (geometric.rms_residual < power.rms_residual && fit.geometric_ratio < 0.9);
  return fit;
}

ConvergenceReport convergence_report(const PullbackResult& result, std::size_t k_min) {
  ConvergenceReport rep;
  rep.drop_rate = result.drop_rate();
  rep.max_residual = result.max_residual;
  std::vector<double> taus;
  double tau_e = std::numeric_limits<double>::infinity();
  for (const auto& tr : result.samples) {
    ConvergenceFit fit = tr.dropped ? ConvergenceFit{} : fit_convergence(tr, k_min);
    rep.fits.push_back(fit);
    if (tr.dropped || (!fit.usable && !fit.far_regime)) continue;
    if (fit.far_regime) {
      ++rep.far_samples;
    } else {
      ++rep.polynomial_samples;
      taus.push_back(fit.tau_sigma);
      tau_e = std::min(tau_e, fit.tau_euclid);
    }
  }
  if (!taus.empty()) {
    std::sort(taus.begin(), taus.end());
    rep.tau_hat = taus.front();
    rep.tau_hat_median = taus[taus.size() / 2];
    rep.tau_hat_euclid = tau_e;
  }
  return rep;
}

}  // namespace gfdyn
