#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gfdyn/rays.hpp"

using namespace gfdyn;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Address, ParseAndPrint) {
  ExternalAddress a = ExternalAddress::parse("1 -2 (0 3)");
  EXPECT_EQ(a.prefix, (std::vector<long>{1, -2}));
  EXPECT_EQ(a.period, (std::vector<long>{0, 3}));
  EXPECT_EQ(ExternalAddress::parse(a.to_string()).to_string(), a.to_string());
  EXPECT_EQ(a[0], 1);
  EXPECT_EQ(a[1], -2);
  EXPECT_EQ(a[2], 0);
  EXPECT_EQ(a[3], 3);
  EXPECT_EQ(a[4], 0);
  ExternalAddress s = a.shifted(3);
  EXPECT_EQ(s[0], 3);
  EXPECT_EQ(s[1], 0);
  EXPECT_THROW(ExternalAddress::parse("1 (2"), DynamicsError);
}

TEST(Address, LexicographicOrder) {
  auto A = ExternalAddress::parse;
  EXPECT_LT(compare_addresses(A("0 (1)"), A("1 (0)")), 0);
  EXPECT_GT(compare_addresses(A("(1)"), A("1 0 (5)")), 0);
  EXPECT_EQ(compare_addresses(A("1 (1)"), A("(1)")), 0);
  EXPECT_LT(compare_addresses(A("-3 (0)"), A("-2 (0)")), 0);
}

TEST(Potential, StepIsExpm1) {
  EXPECT_DOUBLE_EQ(potential_step(0.0), 0.0);
  EXPECT_NEAR(potential_step(2.0), std::exp(2.0) - 1, 1e-13);
}

TEST(Rays, ZeroRayOfShiftedExponentialIsReal) {
  // e^{z-1} maps (1, inf) into itself and every point there escapes.
  const EntireMap f = EntireMap::exp_shift();
  std::vector<double> pots = {0.5, 2.0, 5.0};
  RayTrace t = trace_ray(f, ExternalAddress::parse("(0)"), pots);
  ASSERT_EQ(t.points.size(), 3u);
  double prev = 1.0;
  for (const auto& p : t.points) {
    EXPECT_LT(std::abs(p.z.imag()), 1e-10);
    EXPECT_GT(p.z.real(), prev);
    prev = p.z.real();
  }
}

TEST(Rays, FunctionalEquation) {
  // f(ray_s(t)) = ray_{shift s}(F(t))
  const EntireMap f = EntireMap::exp_kappa(-2.0);
  for (const char* text : {"1 (0)", "-2 1 (0)", "(1 -1)"}) {
    ExternalAddress a = ExternalAddress::parse(text);
    for (double t : {1.0, 2.0}) {
      double pt[1] = {t}, pf[1] = {potential_step(t)};
      cplx z = trace_ray(f, a, pt).points[0].z;
      cplx w = trace_ray(f, a.shifted(), pf).points[0].z;
      EXPECT_LT(std::abs(f.eval(z) - w), 1e-8 * std::max(1.0, std::abs(w))) << text << " t=" << t;
    }
  }
}

TEST(Rays, VerticalOrderAtLargePotential) {
  const EntireMap f = EntireMap::exp_shift();
  std::vector<ExternalAddress> sorted = {ExternalAddress::parse("-1 (0)"), ExternalAddress::parse("0 -1 (0)"),
                                         ExternalAddress::parse("(0)"), ExternalAddress::parse("0 2 (0)"),
                                         ExternalAddress::parse("1 (0)")};
  double pot[1] = {3.0};
  double prev = -INFINITY;
  for (const auto& a : sorted) {
    double im = trace_ray(f, a, pot).points[0].z.imag();
    EXPECT_GT(im, prev) << a.to_string();
    prev = im;
  }
}

TEST(Rays, AddressBoundEnforced) {
  RayOptions o;
  o.address_bound = 2;
  double pot[1] = {1.0};
  EXPECT_THROW(trace_ray(EntireMap::exp_shift(), ExternalAddress::parse("5 (0)"), pot, o), DynamicsError);
  EXPECT_THROW(trace_ray(EntireMap::sine(), ExternalAddress::parse("(0)"), pot), DynamicsError);
}

TEST(Itinerary, NumericalMatchesSymbolic) {
  const EntireMap f = EntireMap::exp_shift();
  Partition part;
  double pot[1] = {2.0};
  for (const char* text : {"1 -1 (0)", "-2 0 1 (0)", "(1)"}) {
    ExternalAddress a = ExternalAddress::parse(text);
    RayTrace t = trace_ray(f, a, pot);
    std::size_t depth = std::min<std::size_t>(3, t.points[0].certified_steps);
    EXPECT_EQ(itinerary(f, t.points[0].z, part, depth), symbolic_itinerary(a, part, depth)) << text;
  }
}

TEST(Endpoint, LandingPointIsPeriodic) {
  // kappa = -2 is of disjoint type; the landing point of (1) is fixed by the
  // branch of the logarithm with imaginary part near 2 pi.
  const EntireMap f = EntireMap::exp_kappa(-2.0);
  cplx z = ray_endpoint(f, ExternalAddress::parse("(1)"));
  EXPECT_LT(std::abs(f.eval(z) - z), 1e-10);
  EXPECT_NEAR(z.imag(), 2 * kPi, kPi);
  cplx w = ray_endpoint(f, ExternalAddress::parse("2 (1)"));
  EXPECT_LT(std::abs(f.eval(w) - z), 1e-9);
}
