// Concrete values with closed-form or hand-derived answers, one test per
// operation.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gfdyn/app/commands.hpp"
#include "gfdyn/examples.hpp"
#include "gfdyn/metrics.hpp"
#include "gfdyn/rays.hpp"
#include "gfdyn/render.hpp"
#include "gfdyn/semiconj.hpp"

using namespace gfdyn;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

MetricConfig quick_metric(const EntireMap& f) {
  MetricBuildOptions o;
  o.radius_samples = 2000;
  o.eps_samples = 2000;
  return build_metric_config(f, o);
}

}  // namespace

TEST(Reference, EvaluationAndDerivatives) {
  EXPECT_EQ(EntireMap::exp_shift().eval(1.0), cplx(1.0));
  EXPECT_EQ(EntireMap::sine().eval(0.0), cplx(0.0));
  EXPECT_LT(std::abs(EntireMap::sine_affine(sine_affine_parameter()).eval(-2 * kPi)), 1e-12);
  EXPECT_EQ(EntireMap::exp_shift().derivative(1.0), cplx(1.0));
  EXPECT_EQ(EntireMap::z_exp_z().derivative(-1.0), cplx(0.0));
  EXPECT_EQ(EntireMap::sine().derivative(0.0), cplx(1.0));
}

TEST(Reference, FiniteDifferencesOutToRadiusTen) {
  std::vector<EntireMap> maps = {EntireMap::exp_shift(), EntireMap::exp_affine({0.3, 0.2}), EntireMap::sine(),
                                 EntireMap::z_exp_z(), EntireMap::sine_affine(sine_affine_parameter())};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rad(0, 10), ang(-kPi, kPi);
  for (const auto& f : maps) {
    for (int i = 0; i < 200; ++i) {
      cplx z = std::polar(rad(rng), ang(rng));
      cplx d = f.derivative(z);
      // Richardson-extrapolated central difference, O(h^4).
      auto cd = [&](double h) { return (f.eval(z + h) - f.eval(z - h)) / (2 * h); };
      cplx fd = (4.0 * cd(5e-4) - cd(1e-3)) / 3.0;
      EXPECT_LT(std::abs(d - fd), 1e-8 * std::max(std::abs(d), 1e-3 * std::abs(f.eval(z))))
          << f.describe() << " z=" << z;
    }
  }
}

TEST(Reference, SingularValueLists) {
  auto kinds = [](const EntireMap& f) {
    std::size_t crit = 0, asym = 0;
    for (const auto& s : f.singular_values()) (s.kind == SingularKind::Critical ? crit : asym)++;
    return std::pair{crit, asym};
  };
  EXPECT_EQ(kinds(EntireMap::exp_shift()), std::pair(std::size_t{0}, std::size_t{1}));
  EXPECT_EQ(kinds(EntireMap::exp_affine(2.0)), std::pair(std::size_t{0}, std::size_t{1}));
  EXPECT_EQ(kinds(EntireMap::sine()), std::pair(std::size_t{2}, std::size_t{0}));
  EXPECT_EQ(kinds(EntireMap::sine_affine(sine_affine_parameter())), std::pair(std::size_t{2}, std::size_t{0}));
  EXPECT_EQ(kinds(EntireMap::z_exp_z()), std::pair(std::size_t{1}, std::size_t{1}));
  EXPECT_EQ(EntireMap::exp_shift().singular_values()[0].value, cplx(0.0));
  // The critical value of f4 is -2 pi.
  bool found = false;
  for (const auto& s : EntireMap::sine_affine(sine_affine_parameter()).singular_values())
    found = found || std::abs(s.value + 2 * kPi) < 1e-12;
  EXPECT_TRUE(found);
}

TEST(Reference, BranchContinuation) {
  // Constant path: the lift is the constant preimage.
  const EntireMap fa = EntireMap::exp_affine(1.0 / (2 * kE));
  std::vector<cplx> constant(5, cplx(1.0));
  auto bc = continue_branch(fa, constant, std::log(2 * kE));
  for (cplx z : bc.preimage_path) EXPECT_LT(std::abs(z - std::log(2 * kE)), 1e-14);

  // e^{z-1} inverted by 1 + log w along a segment.
  const EntireMap f1 = EntireMap::exp_shift();
  std::vector<cplx> seg = {std::exp(-1.0), std::exp(-1.0) + 0.1};
  auto b1 = continue_branch(f1, seg, 0.0);
  EXPECT_LT(std::abs(b1.preimage_path.back() - (std::log(std::exp(-1.0) + 0.1) + 1.0)), 1e-10);

  // A loop around the critical value 1 of sin swaps the two local sheets:
  // starting at pi/6 the lift ends at 5 pi/6.
  std::vector<cplx> loop;
  for (int i = 0; i <= 64; ++i) loop.push_back(1.0 - 0.5 * std::polar(1.0, 2 * kPi * i / 64));
  auto bl = continue_branch(EntireMap::sine(), loop, kPi / 6);
  EXPECT_LT(std::abs(bl.preimage_path.back() - 5 * kPi / 6), 1e-9);
}

TEST(Reference, Orbits) {
  OrbitSample o = iterate(EntireMap::exp_shift(), 0.0, 3, 1e6);
  ASSERT_EQ(o.points.size(), 4u);
  EXPECT_NEAR(o.points[1].real(), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(o.points[2].real(), std::exp(std::exp(-1.0) - 1), 1e-15);
  EXPECT_FALSE(o.escaped);
  EXPECT_TRUE(iterate(EntireMap::sine(), cplx(0, 5), 5, 1e6).escaped);
  OrbitSample big = iterate(EntireMap::sine(), 1e7, 0, 1e6);
  EXPECT_TRUE(big.escaped);
  EXPECT_EQ(big.escape_index, std::optional<std::size_t>(0));
}

TEST(Reference, GermVectors) {
  ParabolicGerm g1 = fit_germ(EntireMap::exp_shift(), 1.0);
  EXPECT_LT(std::abs(g1.repelling[0] - 2.0), 1e-12);
  EXPECT_LT(std::abs(g1.attracting[0] + 2.0), 1e-12);
  ParabolicGerm g2 = fit_germ(EntireMap::sine(), 0.0);
  for (cplx v : g2.attracting) {
    EXPECT_NEAR(std::abs(v.real()), std::sqrt(3.0), 1e-10);
    EXPECT_LT(std::abs(v.imag()), 1e-10);
  }
  ParabolicGerm g3 = fit_germ(EntireMap::z_exp_z(), 0.0);
  EXPECT_LT(std::abs(g3.attracting[0] + 1.0), 1e-12);
}

TEST(Reference, ThinSectorsAtFixedRadius) {
  const EntireMap f1 = EntireMap::exp_shift();
  ParabolicGerm g1 = fit_germ(f1, 1.0);
  InequalityReport r1 = thin_sector_inequalities(f1, g1, 0.05, 10000);
  EXPECT_EQ(r1.violations, 0u);
  EXPECT_GT(r1.min_modulus_margin, 0);
  const EntireMap f2 = EntireMap::sine();
  ParabolicGerm g2 = fit_germ(f2, 0.0);
  EXPECT_EQ(thin_sector_inequalities(f2, g2, 0.05, 10000).violations, 0u);
  // Far too large: the inequalities need not hold, and a failure names a point.
  InequalityReport big = thin_sector_inequalities(f1, g1, 1.5, 10000);
  if (!big.passed) EXPECT_TRUE(big.witness.has_value());
}

TEST(Reference, FatouChartOfShiftedExponential) {
  const EntireMap f = EntireMap::exp_shift();
  ParabolicGerm g = fit_germ(f, 1.0);
  FatouChart att = FatouChart::from_germ(f, g, PetalKind::Attracting, 0, 0.2);
  cplx w = att.kappa(0.9);
  EXPECT_LT(std::abs(w - 20.0), 1e-9);  // -1 / (p a (z - 1)^p) at z = 0.9
  EXPECT_LT(std::abs(att.phi(att.G(w)) - att.phi(w) - 1.0), 1e-6);

  FatouChart rep = FatouChart::from_germ(f, g, PetalKind::Repelling, 0, 0.2);
  EXPECT_THROW(rep.phi(cplx(3.0, 0.5)), DynamicsError);

  auto pts = rep.interior_samples(1000, 4);
  DerivativeBoundReport dr = phi_derivative_bounds(rep, pts);
  EXPECT_EQ(dr.samples, 1000u);
  EXPECT_EQ(dr.violations, 0u);

  FatouChart t = FatouChart::translation();
  auto tp = t.interior_samples(20, 0);
  DerivativeBoundReport td = phi_derivative_bounds(t, tp);
  EXPECT_NEAR(td.min_modulus, 1.0, 1e-6);
  EXPECT_NEAR(td.max_modulus, 1.0, 1e-6);
}

TEST(Reference, CascadeExamples) {
  const EntireMap f1 = EntireMap::exp_shift();
  ParabolicGerm g1 = fit_germ(f1, 1.0);
  CascadeReport zero = cascade_estimates(f1, g1, 1.0 + 0.02, 0, 0.2, 0.5);
  EXPECT_EQ(zero.log_derivative, 0.0);
  EXPECT_TRUE(zero.passed);

  const EntireMap f2 = EntireMap::sine();
  ParabolicGerm g2 = fit_germ(f2, 0.0);
  cplx z = 0.01 * g2.repelling[0] / std::abs(g2.repelling[0]);
  CascadeReport c = cascade_estimates(f2, g2, z, 100, 0.2, 0.5);
  EXPECT_GT(c.modulus_margin, 0);
  EXPECT_GT(c.derivative_margin, 0);
}

TEST(Reference, RamificationFromDefinitions) {
  RamificationData f4 = ramification_data(EntireMap::sine_affine(sine_affine_parameter()));
  bool found = false;
  for (const auto& c : f4.contributions)
    if (std::abs(c.point + 2 * kPi) < 1e-9) {
      EXPECT_EQ(c.weight, 4);
      found = true;
    }
  EXPECT_TRUE(found);
  EXPECT_TRUE(ramification_data(EntireMap::exp_shift()).contributions.empty() ||
              ramification_data(EntireMap::exp_shift()).n_sigma == 1);
}

TEST(Reference, OmegaValues) {
  MetricConfig cfg = quick_metric(EntireMap::exp_shift());
  EXPECT_NEAR(omega_density(cfg, 2.0), 1.0, 1e-15);
  EXPECT_NEAR(omega_density(cfg, 1.0001), 100.0, 1e-9);
  EXPECT_THROW(omega_density(cfg, 1.0), DynamicsError);
  EXPECT_THROW(sigma_density(cfg, 1.0), DynamicsError);
}

TEST(Reference, ComparisonUpperFormula) {
  MetricConfig cfg = quick_metric(EntireMap::exp_shift());
  // Disc of radius K/2 with K = 1.
  cfg.comparison_disc_radius = 0.5;
  const double z = kE * kE;
  EXPECT_NEAR(comparison_densities(cfg, z).upper, 1.0 / (z * std::log(2 * z)), 1e-15);
  EXPECT_THROW(comparison_densities(cfg, 0.4), DynamicsError);
}

TEST(Reference, ExpansionExamples) {
  MetricConfig cfg = quick_metric(EntireMap::exp_shift());
  cfg.comparison_disc_radius = 3.0;
  // Thin repelling sector near 1, image still near 1: omega regime.
  cplx z = 1.0 + cfg.eps_sigma / 4;
  ExpansionFactor e = expansion_factor(cfg, z);
  EXPECT_TRUE(e.source_near && e.image_near);
  EXPECT_GT(e.conservative, 1.0);
  EXPECT_EQ(e.conservative, e.optimistic);

  // A repelling fixed point far from 1: the density ratio is 1, so the
  // bracket must contain |f'(z)|.
  const EntireMap& f = cfg.map;
  cplx p(2.0, 7.0);
  for (int i = 0; i < 50; ++i) p -= (f.eval(p) - p) / (f.derivative(p) - 1.0);
  ASSERT_LT(std::abs(f.eval(p) - p), 1e-12);
  ExpansionFactor fe = expansion_factor(cfg, p);
  const double df = std::abs(f.derivative(p));
  EXPECT_LE(fe.conservative, df * (1 + 1e-12));
  EXPECT_GE(fe.optimistic, df * (1 - 1e-12));
}

TEST(Reference, RescalingExamples) {
  RescalingChoice e = choose_rescaling(EntireMap::exp_shift(), 1.25, 0.2);
  // The orbit of 0 creeps towards 1 like 1 - 2/n.
  EXPECT_LT(e.max_postsingular, 1.0);
  EXPECT_GT(e.max_postsingular, 0.98);
  EXPECT_NEAR(e.L, 1.25 * std::exp(e.K - 1), 1e-9 * e.L);
  EXPECT_LT(std::abs(e.lambda), 1.0);

  RescalingChoice s = choose_rescaling(EntireMap::sine(), 1.25, 0.2);
  EXPECT_NEAR(std::abs(s.lambda), s.K / (1.25 * std::sinh(s.K)), 0.01 * std::abs(s.lambda));
  DisjointTypeReport st = verify_disjoint_type(EntireMap::sine(), s);
  EXPECT_LT(std::abs(st.attracting_fixed_point), 1e-12);
  EXPECT_NEAR(std::abs(st.multiplier), std::abs(s.lambda), 1e-12);

  RescalingChoice bad = s;
  bad.L = bad.K;
  bad.lambda = 1.0;
  EXPECT_THROW(verify_disjoint_type(EntireMap::sine(), bad), DynamicsError);
}

TEST(Reference, PullbackFirstLevelIsLambdaZ) {
  const EntireMap f = EntireMap::exp_shift();
  MetricConfig m = quick_metric(f);
  RescalingChoice rc = choose_rescaling(f, 1.25, parabolic_floor(m));
  EntireMap g = rescaled_map(f, rc);
  auto samples = app::symbolic_samples(g, app::sample_addresses(4, 2, 2, 0.5, 3), 6);
  PullbackOptions po;
  po.levels = 4;
  PullbackResult r = run_pullback(f, rc, samples, po);
  for (const auto& t : r.samples) {
    ASSERT_GE(t.theta.size(), 2u);
    EXPECT_EQ(t.theta[0], t.start);
    EXPECT_LT(std::abs(t.theta[1] - rc.lambda * t.start), 1e-15 * std::abs(t.theta[1]));
  }

  // A g-orbit shorter than the requested depth drops the sample.
  PullbackSample shallow = forward_sample(g, cplx(30.0, 0.5), 40);
  po.levels = 10;
  PullbackResult d = run_pullback(f, rc, {shallow}, po);
  EXPECT_EQ(d.dropped, 1u);
  EXPECT_FALSE(d.samples[0].drop_reason.empty());
}

TEST(Reference, ConvergenceNeedsLevels) {
  SampleTrace t;
  t.step_lengths = {1.0, 0.5};
  EXPECT_THROW(fit_convergence(t, 0), DynamicsError);
}

TEST(Reference, ZeroRayOfModel) {
  const EntireMap f = EntireMap::exp_shift();
  RescalingChoice rc = choose_rescaling(f, 1.25, 0.2);
  EntireMap g = rescaled_map(f, rc);
  std::vector<double> pots = {3.0, 6.0};
  RayTrace t = trace_ray(g, ExternalAddress::parse("(0)"), pots);
  EXPECT_LT(std::abs(t.points[0].z.imag()), 1e-9);
  EXPECT_LT(std::abs(t.points[0].z), std::abs(t.points[1].z));
  Partition part;
  auto it = itinerary(g, t.points[0].z, part, std::min<std::size_t>(3, t.points[0].certified_steps));
  for (long s : it) EXPECT_EQ(s, 0);
  EXPECT_TRUE(itinerary(g, t.points[0].z, part, 0).empty());
}

TEST(Reference, ShiftEquivarianceOfRays) {
  const EntireMap f = EntireMap::exp_shift();
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> entry(-3, 3);
  for (int i = 0; i < 50; ++i) {
    ExternalAddress a;
    for (int j = 0; j < 3; ++j) a.prefix.push_back(entry(rng));
    a.period = {entry(rng)};
    double t[1] = {1.5}, ft[1] = {potential_step(1.5)};
    cplx z = trace_ray(f, a, t).points[0].z;
    cplx w = trace_ray(f, a.shifted(), ft).points[0].z;
    EXPECT_LT(std::abs(f.eval(z) - w), 1e-6 * std::abs(w)) << a.to_string();
  }
}

TEST(Reference, PartitionBoundaryFlagged) {
  // Standard strips |Im xi - 2 pi k| < pi in the normal form; Im xi = pi is a cut.
  const EntireMap f = EntireMap::exp_kappa(-2.0);
  Partition part;
  EXPECT_THROW(itinerary(f, cplx(0.3, kPi), part, 1), DynamicsError);
}

TEST(Reference, RenderExamples) {
  const EntireMap s = EntireMap::sine();
  RenderJob job{s, {0.0, 12.0, 256, 256}, 2000, 1e6, parabolic_targets(s, 0.05), 64, 1};
  for (int i = 1; i <= 100; ++i) {
    double y = 6.0 * i / 101.0;
    EXPECT_NE(classify(job, cplx(0, y)).cls, PixelClass::Basin) << y;
    EXPECT_NE(classify(job, cplx(0, -y)).cls, PixelClass::Basin) << -y;
  }
  EXPECT_EQ(tile_schedule(1024, 1024, 64).size(), 256u);
  EXPECT_EQ(tile_schedule(100, 80, 512).size(), 1u);
}

TEST(Reference, ExampleClassification) {
  MapClassification c = classify_map(EntireMap::z_exp_z());
  bool along_minus_one = false;
  for (const auto& o : c.orbits)
    if (o.value.kind == SingularKind::Critical) along_minus_one = o.fate == SingularFate::AttractedToParabolic;
  EXPECT_TRUE(along_minus_one);
  EXPECT_NEAR(sine_affine_parameter(), 2 * std::atan(2 * kPi) - kPi / 2, 1e-12);
}

TEST(Reference, PetalCommandOnShiftedExponential) {
  app::ExperimentConfig cfg;
  app::Report r = app::cmd_petal(cfg);
  EXPECT_TRUE(r.passed()) << r.summary();
}
