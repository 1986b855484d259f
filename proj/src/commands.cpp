#include "gfdyn/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "gfdyn/error.hpp"
#include "gfdyn/examples.hpp"
#include "gfdyn/metrics.hpp"
#include "gfdyn/parabolic.hpp"
#include "gfdyn/render.hpp"
#include "gfdyn/sampling.hpp"

namespace gfdyn::app {

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json germ_json(const ParabolicGerm& g) {
  json rep = json::array(), att = json::array();
  for (cplx v : g.repelling) rep.push_back(complex_to_json(v));
  for (cplx v : g.attracting) att.push_back(complex_to_json(v));
  return {{"zeta", complex_to_json(g.zeta)}, {"p", g.p}, {"a", complex_to_json(g.a)},
          {"repelling", rep}, {"attracting", att}};
}

std::vector<ParabolicGerm> germs_of(const EntireMap& f) {
  std::vector<ParabolicGerm> out;
  for (cplx z : parabolic_points(f)) out.push_back(fit_germ(f, z));
  return out;
}

MetricConfig metric_config(const EntireMap& f, const ExperimentConfig& cfg) {
  MetricBuildOptions mo;
  mo.radius_samples = cfg.petal.radius_samples;
  mo.eps_samples = cfg.metric.eps_samples;
  mo.seed = cfg.seed;
  mo.radius_cap = cfg.petal.radius_cap;
  MetricConfig m = build_metric_config(f, mo);
  if (cfg.metric.eps_sigma) m.eps_sigma = *cfg.metric.eps_sigma;
  return m;
}

const char* kind_name(PetalKind k) { return k == PetalKind::Repelling ? "repelling" : "attracting"; }

}  // namespace

std::vector<ExternalAddress> sample_addresses(std::size_t count, long bound, std::size_t prefix_length,
                                              double tail_fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> entry(-bound, bound);
  std::uniform_int_distribution<int> period_len(1, 2);
  std::vector<ExternalAddress> out;
  for (std::size_t i = 0; i < count; ++i) {
    ExternalAddress a;
    for (std::size_t j = 0; j < prefix_length; ++j) a.prefix.push_back(entry(rng));
    bool zero_tail = std::floor((i + 1) * tail_fraction) > std::floor(i * tail_fraction);
    if (zero_tail || bound == 0) {
      a.period = {0};
    } else {
      do {
        a.period.clear();
        for (int j = period_len(rng); j > 0; --j) a.period.push_back(entry(rng));
      } while (std::all_of(a.period.begin(), a.period.end(), [](long s) { return s == 0; }));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<ExternalAddress> distinct_prefix_addresses(std::size_t count, long bound, std::uint64_t seed) {
  const long side = 2 * bound + 1;
  if (bound < 1 || static_cast<double>(side) * side * side < static_cast<double>(count))
    throw DynamicsError(ErrorKind::ConfigError, "address bound too small for the requested number of rays");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> entry(-bound, bound);
  std::set<std::vector<long>> seen;
  std::vector<ExternalAddress> out;
  while (out.size() < count) {
    std::vector<long> p = {entry(rng), entry(rng), entry(rng)};
    if (!seen.insert(p).second) continue;
    out.push_back({p, {0}});
  }
  return out;
}

std::vector<PullbackSample> symbolic_samples(const EntireMap& g, const std::vector<ExternalAddress>& addresses,
                                             std::size_t depth) {
  std::vector<PullbackSample> out;
  out.reserve(addresses.size());
  for (std::size_t i = 0; i < addresses.size(); ++i)
    out.push_back(symbolic_sample(g, addresses[i].prefix, addresses[i].period, depth, i % 2 == 0));
  return out;
}

std::string step_length_csv(const PullbackResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "sample,label,level,step_length,sigma_length\n";
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    const auto& t = result.samples[i];
    for (std::size_t k = 0; k < t.step_lengths.size(); ++k) {
      os << i << ",\"" << t.label << "\"," << k << ',' << t.step_lengths[k] << ',';
      if (k < t.sigma_lengths.size()) os << t.sigma_lengths[k];
      os << '\n';
    }
  }
  return os.str();
}

Report cmd_examples(const ExperimentConfig& cfg) {
  Report r;
  r.command = "examples";
  r.config = cfg;
  Stopwatch sw;

  const double a = sine_affine_parameter();
  r.add(check_less("sine_affine_parameter", std::abs(a - 1.255134), 1e-5, "|a - 1.255134|"));
  const double a_closed = 2 * std::atan(2 * kPi) - kPi / 2;
  r.add(check_less("sine_affine_parameter_closed_form", std::abs(a - a_closed), 1e-12,
                   "bisection vs 2 atan(2 pi) - pi/2"));
  auto examples = standard_examples();
  const EntireMap& f4 = examples[3].map;
  r.add(check_less("critical_value_maps_to_zero", std::abs(f4.eval(-2 * kPi)), 1e-12, "|f4(-2 pi)|"));

  json ex = json::array();
  for (const auto& e : examples) {
    for (cplx zeta : e.par_points) {
      r.add(check_less(e.id + "_multiplier", std::abs(e.map.derivative(zeta) - 1.0), 1e-12,
                       "|f'(zeta) - 1| at zeta = " + std::to_string(zeta.real())));
    }
    MapClassification c = classify_map(e.map);
    json orbits = json::array();
    for (const auto& o : c.orbits)
      orbits.push_back({{"value", complex_to_json(o.value.value)},
                        {"kind", o.value.kind == SingularKind::Critical ? "critical" : "asymptotic"},
                        {"fate", to_string(o.fate)},
                        {"steps", o.steps},
                        {"limit", complex_to_json(o.limit)}});
    ex.push_back({{"id", e.id},
                  {"map", e.map.describe()},
                  {"geometrically_finite", c.geometrically_finite},
                  {"strongly_geometrically_finite", c.strongly_geometrically_finite},
                  {"subhyperbolic", c.subhyperbolic},
                  {"asymptotic_value_in_julia", c.asymptotic_value_in_julia},
                  {"singular_orbits", orbits}});
    const bool expect_sgf = e.id != "f3";
    r.add(check_true(e.id + "_geometrically_finite", c.geometrically_finite));
    r.add(check_true(e.id + "_strongly_geometrically_finite_" + (expect_sgf ? "yes" : "no"),
                     c.strongly_geometrically_finite == expect_sgf));
    r.add(check_true(e.id + "_not_subhyperbolic", !c.subhyperbolic));

    if (e.id == "f3") {
      // The critical value -1/e is captured by the attracting petal at 0,
      // whose only direction is -1.
      bool along = false;
      for (const auto& o : c.orbits)
        if (o.value.kind == SingularKind::Critical && o.fate == SingularFate::AttractedToParabolic &&
            std::abs(o.limit) < 1e-12)
          along = true;
      ParabolicGerm g = fit_germ(e.map, 0.0);
      along = along && g.attracting.size() == 1 && std::abs(g.attracting[0] - cplx(-1.0)) < 1e-12;
      r.add(check_true("f3_critical_value_attracted_along_minus_one", along));
      int zeros10 = count_solutions_in_disc(e.map, 0.0, 0.0, 10.0);
      int zeros50 = count_solutions_in_disc(e.map, 0.0, 0.0, 50.0);
      r.add(check_true("f3_zero_has_single_preimage", zeros10 == 1 && zeros50 == 1,
                       "solutions of z e^z = 0 in |z| < 10 and |z| < 50"));
      r.add(check_true("f3_asymptotic_value_in_julia", c.asymptotic_value_in_julia));
    }
    if (e.id == "f2") {
      // Points on the imaginary axis escape: sin(iy) = i sinh(y).
      std::size_t escaped = 0;
      const std::size_t n = 100;
      for (std::size_t i = 0; i < n; ++i) {
        double y = 0.5 + 4.5 * (static_cast<double>(i) + 0.5) / n;
        OrbitSample o = iterate(e.map, cplx(0, i % 2 ? y : -y), 64, 1e12);
        if (o.escaped) ++escaped;
      }
      r.add(check_at_least("f2_imaginary_axis_escapes", static_cast<double>(escaped), static_cast<double>(n),
                           "samples on the imaginary axis escaping within 64 steps"));
    }
  }
  r.results["parameter_a"] = a;
  r.results["examples"] = ex;
  r.timing["total"] = sw.lap();
  return r;
}

Report cmd_petal(const ExperimentConfig& cfg) {
  Report r;
  r.command = "petal";
  r.config = cfg;
  Stopwatch sw;
  const EntireMap f = cfg.map.build();
  const auto& ps = cfg.petal;

  auto germs = germs_of(f);
  r.add(check_true("has_parabolic_point", !germs.empty(), f.describe()));
  double s = 0.5;
  try {
    s = ramification_data(f).s;
  } catch (const DynamicsError&) {
  }

  json out = json::array();
  double t_ineq = 0, t_cascade = 0, t_chart = 0;
  for (std::size_t gi = 0; gi < germs.size(); ++gi) {
    const auto& g = germs[gi];
    const std::string tag = "germ" + std::to_string(gi);
    json gj = germ_json(g);

    sw.lap();
    double r_min = validated_radius(f, g, ps.radius_samples, ps.radius_cap, cfg.seed);
    InequalityReport ir = thin_sector_inequalities(f, g, r_min, ps.inequality_samples, cfg.seed);
    t_ineq += sw.lap();
    gj["r_min"] = r_min;
    gj["inequality"] = {{"samples", ir.samples},
                        {"violations", ir.violations},
                        {"min_modulus_margin", ir.min_modulus_margin},
                        {"min_derivative_margin", ir.min_derivative_margin}};
    {
      Check& c = r.add(check_less(tag + "_thin_sector_violations", static_cast<double>(ir.violations), 1,
                                  std::to_string(ir.samples) + " samples at r_min"));
      c.witness = ir.witness;
    }

    // Cascade: orbits started near zeta inside each thin sector, followed
    // until they leave it.
    std::size_t orbits = 0, violations = 0, max_len = 0, min_len = SIZE_MAX;
    double min_dm = INFINITY, min_mm = INFINITY, min_wm = INFINITY;
    std::optional<cplx> witness;
    LowDiscrepancy2D seq(cfg.seed + 7919 * gi);
    const double half = kPi / (8 * g.p);
    const double lo = std::log(ps.cascade_start_min * r_min), hi = std::log(ps.cascade_start_max * r_min);
    for (std::size_t n = 0; orbits < ps.cascade_orbits && n < 100 * ps.cascade_orbits; ++n) {
      auto [u1, u2] = seq(n);
      std::size_t j = orbits % g.repelling.size();
      double ang = std::arg(g.repelling[j]) + (2 * u2 - 1) * 0.9 * half;
      cplx z = g.zeta + std::polar(std::exp(lo + u1 * (hi - lo)), ang);
      std::size_t len = steps_in_thin_sector(f, g, j, z, r_min, ps.cascade_cap);
      if (len == 0) continue;
      ++orbits;
      CascadeReport cr = cascade_estimates(f, g, z, len, r_min, s);
      max_len = std::max(max_len, len);
      min_len = std::min(min_len, len);
      min_dm = std::min(min_dm, cr.derivative_margin);
      min_mm = std::min(min_mm, cr.modulus_margin);
      min_wm = std::min(min_wm, cr.weighted_margin);
      if (!(cr.derivative_margin > 0) || !(cr.modulus_margin > 0)) {
        ++violations;
        if (!witness) witness = z;
      }
    }
    t_cascade += sw.lap();
    gj["cascade"] = {{"orbits", orbits},
                     {"violations", violations},
                     {"min_length", orbits ? min_len : 0},
                     {"max_length", max_len},
                     {"min_log_derivative_margin", min_dm},
                     {"min_log_modulus_margin", min_mm},
                     {"min_log_weighted_margin", min_wm}};
    r.add(check_at_least(tag + "_cascade_orbits", static_cast<double>(orbits),
                         static_cast<double>(ps.cascade_orbits)));
    {
      Check& c = r.add(check_less(tag + "_cascade_violations", static_cast<double>(violations), 1,
                                  "derivative and modulus bounds at every prefix"));
      c.witness = witness;
    }

    // Fatou coordinates on the first repelling and attracting petals.
    json charts = json::array();
    const std::size_t per_chart = (ps.chart_samples + 1) / 2;
    for (PetalKind kind : {PetalKind::Repelling, PetalKind::Attracting}) {
      FatouChart chart = FatouChart::from_germ(f, g, kind, 0, r_min, ps.truncation);
      auto pts = chart.interior_samples(per_chart, cfg.seed + gi);
      AbelReport ar = abel_residuals(chart, pts, ps.abel_tolerance);
      DerivativeBoundReport dr = phi_derivative_bounds(chart, pts);
      const std::string ct = tag + "_" + kind_name(kind);
      charts.push_back({{"kind", kind_name(kind)},
                        {"rho", chart.rho()},
                        {"beta", chart.beta()},
                        {"samples", pts.size()},
                        {"max_abel_residual", ar.max_residual},
                        {"min_phi_derivative", dr.min_modulus},
                        {"max_phi_derivative", dr.max_modulus},
                        {"derivative_violations", dr.violations}});
      r.add(check_at_least(ct + "_chart_samples", static_cast<double>(pts.size()),
                           static_cast<double>(per_chart)));
      {
        Check& c = r.add(check_less(ct + "_abel_residual", ar.max_residual, ps.abel_tolerance));
        c.witness = ar.witness;
      }
      {
        Check& c = r.add(check_less(ct + "_phi_derivative_violations", static_cast<double>(dr.violations), 1,
                                    "|Phi'| within (9/80, 169/48)"));
        c.witness = dr.witness;
      }
    }
    t_chart += sw.lap();
    gj["charts"] = charts;
    out.push_back(gj);
  }
  r.results["map"] = f.describe();
  r.results["s"] = s;
  r.results["germs"] = out;
  r.timing = {{"inequalities", t_ineq}, {"cascade", t_cascade}, {"charts", t_chart}};
  return r;
}

Report cmd_metric(const ExperimentConfig& cfg) {
  Report r;
  r.command = "metric";
  r.config = cfg;
  Stopwatch sw;
  const EntireMap f = cfg.map.build();
  const auto& ms = cfg.metric;

  RamificationData rd = ramification_data(f);
  json contrib = json::array();
  for (const auto& c : rd.contributions)
    contrib.push_back({{"point", complex_to_json(c.point)}, {"degree", c.degree}, {"weight", c.weight}});
  r.results["ramification"] = {{"n_sigma", rd.n_sigma}, {"s", rd.s}, {"contributions", contrib},
                               {"asymptotic_value_in_julia", rd.asymptotic_value_in_julia},
                               {"note", rd.note}};

  MetricConfig mc = metric_config(f, cfg);
  RescalingChoice rc = choose_rescaling(f, cfg.semiconj.safety, parabolic_floor(mc));
  mc.comparison_disc_radius = rc.K / 2;
  r.timing["setup"] = sw.lap();
  r.results["r_min"] = mc.petal_radius;
  r.results["eps_sigma"] = mc.eps_sigma;
  r.results["comparison_disc_radius"] = mc.comparison_disc_radius;

  SuiteReport near = near_parabolic_suite(mc, mc.eps_sigma, ms.near_samples, cfg.seed);
  r.timing["near"] = sw.lap();
  r.results["near"] = {{"samples", near.samples}, {"failures", near.failures},
                       {"min_factor", near.min_conservative}};
  r.add(check_at_least("near_samples", static_cast<double>(near.samples), static_cast<double>(ms.near_samples)));
  {
    Check& c = r.add(check_greater("near_min_factor", near.min_conservative, 1.0,
                                   "omega-weighted factor, exact in this regime"));
    c.witness = near.witness;
  }

  SuiteReport far = far_regime_suite(mc, ms.far_samples, cfg.seed, ms.outer_factor);
  r.timing["far"] = sw.lap();

  // Where conservative failures happen, by |z| / R in eight log-spaced bins.
  const double R = mc.comparison_disc_radius;
  std::vector<std::size_t> bin_total(8), bin_fail(8);
  LowDiscrepancy2D seq(cfg.seed);
  for (std::size_t n = 0, used = 0; used < ms.far_samples && n < 100 * ms.far_samples; ++n) {
    auto [s1, s2] = seq(n);
    double rad = R * std::exp(s1 * std::log(ms.outer_factor));
    cplx z = std::polar(rad, 2 * kPi * s2);
    cplx fz = f.eval(z);
    if (overflowed(fz) || !(std::abs(fz) > R) || !(rad > R) || parabolic_distance(mc, z) < mc.eps_sigma) continue;
    ++used;
    auto b = std::min<std::size_t>(7, static_cast<std::size_t>(s1 * 8));
    ++bin_total[b];
    if (!(expansion_factor(mc, z).conservative > 1)) ++bin_fail[b];
  }
  json bins = json::array();
  for (std::size_t b = 0; b < 8; ++b)
    bins.push_back({{"r_over_R_from", std::pow(ms.outer_factor, b / 8.0)},
                    {"r_over_R_to", std::pow(ms.outer_factor, (b + 1) / 8.0)},
                    {"samples", bin_total[b]},
                    {"conservative_failures", bin_fail[b]}});
  r.results["far"] = {{"samples", far.samples},
                      {"conservative_failures", far.failures},
                      {"optimistic_failures", far.optimistic_failures},
                      {"min_conservative", far.min_conservative},
                      {"min_optimistic", far.min_optimistic},
                      {"by_radius", bins}};
  r.add(check_at_least("far_samples", static_cast<double>(far.samples), static_cast<double>(ms.far_samples)));
  {
    Check& c = r.add(check_less("far_optimistic_failures", static_cast<double>(far.optimistic_failures), 1));
    c.witness = far.witness;
  }
  {
    Check& c = r.add(check_less("far_conservative_failure_rate", far.conservative_failure_rate(),
                                ms.max_conservative_failure,
                                "bracket diagnostic; only the optimistic side is required"));
    c.diagnostic = true;
  }
  return r;
}

Report cmd_semiconj(const ExperimentConfig& cfg, const std::string& out_dir) {
  Report r;
  r.command = "semiconj";
  r.config = cfg;
  Stopwatch sw;
  const EntireMap f = cfg.map.build();
  const auto& ss = cfg.semiconj;
  if (f.family() == Family::ZExpZ)
    throw DynamicsError(ErrorKind::ConfigError,
                        "map.family: semiconj needs a strongly geometrically finite map; z e^z has its "
                        "asymptotic value in the Julia set");

  MetricConfig mc = metric_config(f, cfg);
  RescalingChoice rc = choose_rescaling(f, ss.safety, parabolic_floor(mc));
  mc.comparison_disc_radius = rc.K / 2;
  DisjointTypeReport dt = verify_disjoint_type(f, rc);
  r.results["rescaling"] = {{"K", rc.K},
                            {"L", rc.L},
                            {"lambda", complex_to_json(rc.lambda)},
                            {"max_postsingular", rc.max_postsingular},
                            {"floor_radius", rc.floor_radius},
                            {"grid_points", rc.grid_points}};
  r.results["disjoint_type"] = {{"max_on_circle", dt.max_on_circle},
                                {"margin", dt.margin},
                                {"attracting_fixed_point", complex_to_json(dt.attracting_fixed_point)},
                                {"multiplier", std::abs(dt.multiplier)}};
  r.add(check_greater("disjoint_type_margin", dt.margin, 1.0, "L / max|g| on |z| = L"));
  r.timing["setup"] = sw.lap();

  const EntireMap g = rescaled_map(f, rc);
  auto addresses = sample_addresses(ss.samples, ss.address_bound, ss.prefix_length, ss.parabolic_tail_fraction,
                                    cfg.seed);
  auto samples = symbolic_samples(g, addresses, ss.levels + 2);

  PullbackOptions po;
  po.levels = ss.levels;
  po.threads = resolve_threads(cfg.threads);
  po.residual_tolerance = ss.residual_tolerance;
  PullbackResult pr = run_pullback(f, rc, samples, po, &mc);
  ConvergenceReport cr = convergence_report(pr);
  r.timing["pullback"] = sw.lap();

  json per = json::array();
  for (std::size_t i = 0; i < pr.samples.size(); ++i) {
    const auto& t = pr.samples[i];
    const auto& fit = cr.fits[i];
    per.push_back({{"label", t.label},
                   {"dropped", t.dropped},
                   {"drop_reason", t.drop_reason},
                   {"max_residual", t.max_residual},
                   {"tau_euclid", fit.tau_euclid},
                   {"tau_sigma", fit.tau_sigma},
                   {"far_regime", fit.far_regime},
                   {"geometric_ratio", fit.geometric_ratio}});
  }
  r.results["convergence"] = {{"tau_hat", cr.tau_hat},
                              {"tau_hat_median", cr.tau_hat_median},
                              {"tau_hat_euclid", cr.tau_hat_euclid},
                              {"polynomial_samples", cr.polynomial_samples},
                              {"far_samples", cr.far_samples},
                              {"drop_rate", cr.drop_rate},
                              {"max_residual", cr.max_residual},
                              {"eps_sigma", mc.eps_sigma},
                              {"r_min", mc.petal_radius},
                              {"samples", per}};
  r.add(check_less("functional_relation_residual", cr.max_residual, ss.residual_tolerance));
  r.add(check_less("drop_rate", cr.drop_rate, ss.max_drop_rate));
  r.add(check_at_least("polynomial_regime_samples", static_cast<double>(cr.polynomial_samples), 1));
  r.add(check_at_least("tau_hat", cr.tau_hat, ss.tau_min, "smallest fitted sigma decay exponent"));

  if (!out_dir.empty()) {
    std::ofstream csv(std::filesystem::path(out_dir) / "step_lengths.csv");
    csv << step_length_csv(pr);
    r.results["csv"] = "step_lengths.csv";
  }
  return r;
}

Report cmd_ray(const ExperimentConfig& cfg) {
  Report r;
  r.command = "ray";
  r.config = cfg;
  Stopwatch sw;
  const EntireMap f = cfg.map.build();
  const auto& rs = cfg.ray;
  if (!f.is_exponential())
    throw DynamicsError(ErrorKind::ConfigError, "map.family: rays are implemented for exponential maps only");

  auto addresses = distinct_prefix_addresses(rs.addresses, std::min<long>(rs.address_bound, 3), cfg.seed);
  std::vector<std::size_t> lex(addresses.size());
  for (std::size_t i = 0; i < lex.size(); ++i) lex[i] = i;
  std::sort(lex.begin(), lex.end(),
            [&](std::size_t i, std::size_t j) { return compare_addresses(addresses[i], addresses[j]) < 0; });
  auto vertical_matches = [&](const std::vector<cplx>& pts) {
    std::vector<std::size_t> v = lex;
    std::stable_sort(v.begin(), v.end(), [&](std::size_t i, std::size_t j) { return pts[i].imag() < pts[j].imag(); });
    return v == lex;
  };

  RayOptions ro;
  ro.depth = rs.depth;
  ro.address_bound = rs.address_bound;
  const double pot[1] = {rs.potential};
  std::vector<cplx> traced;
  std::size_t itinerary_mismatch = 0;
  Partition part;
  if (rs.partition_address) part.ray_address = ExternalAddress::parse(*rs.partition_address);
  for (const auto& a : addresses) {
    RayTrace t = trace_ray(f, a, pot, ro);
    traced.push_back(t.points[0].z);
    const std::size_t depth = std::min<std::size_t>(3, t.points[0].certified_steps);
    try {
      if (itinerary(f, t.points[0].z, part, depth) != symbolic_itinerary(a, part, depth)) ++itinerary_mismatch;
    } catch (const DynamicsError&) {
      ++itinerary_mismatch;
    }
  }
  r.add(check_true("traced_points_vertical_order", vertical_matches(traced),
                   "lexicographic order of addresses equals order of Im z at t = " + std::to_string(rs.potential)));
  r.add(check_less("itinerary_mismatches", static_cast<double>(itinerary_mismatch), 1,
                   "numerical itinerary vs symbolic itinerary of the traced points"));
  r.timing["trace"] = sw.lap();

  // Pullback on the disjoint-type model: ray points at the same potential
  // (deepest level their g-orbits allow) and the landing points.
  MetricConfig mc = metric_config(f, cfg);
  RescalingChoice rc = choose_rescaling(f, cfg.semiconj.safety, parabolic_floor(mc));
  const EntireMap g = rescaled_map(f, rc);
  std::vector<PullbackSample> ray_samples;
  std::vector<cplx> traced_g;
  std::size_t common = SIZE_MAX;
  for (const auto& a : addresses) {
    ray_samples.push_back(ray_point_sample(g, a, rs.potential, rs.depth));
    traced_g.push_back(ray_samples.back().start);
    common = std::min(common, ray_samples.back().orbit.size());
  }
  r.add(check_true("model_traced_points_vertical_order", vertical_matches(traced_g)));

  PullbackOptions po;
  po.threads = resolve_threads(cfg.threads);
  po.levels = common >= 2 ? common - 2 : 0;
  std::vector<cplx> images;
  std::size_t dropped = 0;
  if (po.levels > 0) {
    PullbackResult pr = run_pullback(f, rc, ray_samples, po);
    dropped += pr.dropped;
    for (const auto& t : pr.samples) images.push_back(t.theta.empty() ? cplx(0) : t.theta.back());
  }
  r.add(check_greater("ray_point_levels", static_cast<double>(po.levels), 0,
                      "deepest level available to all ray-point orbits"));
  r.add(check_true("ray_point_images_vertical_order", !images.empty() && dropped == 0 && vertical_matches(images)));

  po.levels = rs.endpoint_levels;
  auto endpoints = symbolic_samples(g, addresses, rs.endpoint_levels + 2);
  PullbackResult er = run_pullback(f, rc, endpoints, po);
  std::vector<cplx> end_images;
  for (const auto& t : er.samples) end_images.push_back(t.theta.empty() ? cplx(0) : t.theta.back());
  std::size_t inversions = 0;
  for (std::size_t i = 0; i + 1 < lex.size(); ++i)
    if (!(end_images[lex[i]].imag() < end_images[lex[i + 1]].imag())) ++inversions;
  {
    // Landing points may be identified or sit on bent hairs, so their
    // vertical order is informative only.
    Check& c = r.add(check_less("landing_point_order_inversions", static_cast<double>(inversions), 1,
                                "adjacent pairs out of order at level " + std::to_string(rs.endpoint_levels)));
    c.diagnostic = true;
  }
  r.results["landing_dropped"] = er.dropped;
  r.timing["pullback"] = sw.lap();

  json rays = json::array();
  for (std::size_t i = 0; i < addresses.size(); ++i)
    rays.push_back({{"address", addresses[i].to_string()},
                    {"traced", complex_to_json(traced[i])},
                    {"model_traced", complex_to_json(traced_g[i])},
                    {"image", images.empty() ? json(nullptr) : complex_to_json(images[i])},
                    {"landing_image", complex_to_json(end_images[i])}});
  r.results["ray_point_levels"] = common >= 2 ? common - 2 : 0;
  r.results["rays"] = rays;
  return r;
}

Report cmd_render(const ExperimentConfig& cfg, const std::string& out_dir) {
  Report r;
  r.command = "render";
  r.config = cfg;
  Stopwatch sw;
  const EntireMap f = cfg.map.build();
  const auto& rs = cfg.render;

  double sector_radius = 0;
  if (rs.sector_radius) {
    sector_radius = *rs.sector_radius;
  } else {
    double r_min = cfg.petal.radius_cap;
    for (const auto& g : germs_of(f))
      r_min = std::min(r_min, validated_radius(f, g, cfg.petal.radius_samples, cfg.petal.radius_cap, cfg.seed));
    sector_radius = r_min / 2;
  }
  RenderJob job{f, {rs.center, rs.width, rs.width_px, rs.height_px}, rs.max_iter, rs.bailout,
                parabolic_targets(f, sector_radius), rs.tile, resolve_threads(cfg.threads)};
  const double setup = sw.lap();
  r.timing["setup"] = setup;
  RenderResult res = render(job);
  r.timing["render"] = res.wall_seconds;

  json basins = json::array();
  for (std::size_t i = 0; i < job.targets.size(); ++i)
    basins.push_back({{"label", job.targets[i].label}, {"pixels", res.basin_counts[i]}});
  r.results["sector_radius"] = sector_radius;
  r.results["hash"] = hex64(res.hash);
  r.results["escaped"] = res.escaped;
  r.results["undecided"] = res.undecided;
  r.results["basins"] = basins;
  r.results["tiles"] = tile_schedule(rs.width_px, rs.height_px, rs.tile).size();

  // Spot checks with known answers.
  if (f.family() == Family::Sine) {
    std::size_t total = 0, basin = 0;
    const double px = job.viewport.pixel_size();
    for (std::size_t y = 0; y < rs.height_px; ++y) {
      cplx c = job.viewport.pixel_center(0, y);
      double im = c.imag();
      if (std::abs(im) < 0.5 || std::abs(im) > 5) continue;
      std::size_t x = static_cast<std::size_t>(std::floor((0.0 - (rs.center.real() - rs.width / 2)) / px));
      if (x >= rs.width_px) continue;
      ++total;
      if (res.pixels[y * rs.width_px + x].cls == PixelClass::Basin) ++basin;
    }
    double frac = total ? 1.0 - static_cast<double>(basin) / total : 0.0;
    r.add(check_at_least("imaginary_axis_non_basin_fraction", frac, 0.99,
                         std::to_string(total) + " axis pixels with 0.5 <= |y| <= 5"));
  }
  if (f.family() == Family::ZExpZ) {
    PixelResult p = classify(job, -std::exp(-1.0));
    r.add(check_true("critical_value_in_basin", p.cls == PixelClass::Basin, "z = -1/e"));
  }
  if (f.family() == Family::ExpShift) {
    PixelResult p = classify(job, 1.0);
    r.add(check_true("parabolic_point_undecided", p.cls == PixelClass::Undecided, "z = 1"));
  }

  if (!out_dir.empty()) {
    auto path = std::filesystem::path(out_dir) / rs.png;
    write_png(path.string(), res.width, res.height, res.rgb);
    r.results["png"] = rs.png;
  }
  r.timing["total"] = setup + sw.lap();
  return r;
}

Report run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  if (name == "examples") return cmd_examples(cfg);
  if (name == "petal") return cmd_petal(cfg);
  if (name == "metric") return cmd_metric(cfg);
  if (name == "semiconj") return cmd_semiconj(cfg, out_dir);
  if (name == "ray") return cmd_ray(cfg);
  if (name == "render") return cmd_render(cfg, out_dir);
  throw DynamicsError(ErrorKind::ConfigError, "unknown command '" + name + "'");
}

}  // namespace gfdyn::app
