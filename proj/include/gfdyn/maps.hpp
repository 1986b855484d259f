#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gfdyn/error.hpp"

namespace gfdyn {

enum class Family { ExpAffine, ExpKappa, ExpShift, Sine, ZExpZ, SineAffine, Rescaled };

std::string_view to_string(Family family);

// Every supported map, rescaled or not, reduces to one of three closed
// forms. These are what the hot loops evaluate.
struct ExpKernel {   // A e^{Bz} + C
  cplx A, B, C;
};
struct SineKernel {  // A sin(Bz + C) + D
  cplx A, B, C, D;
};
struct ZExpKernel {  // (sz) e^{sz}
  cplx s;
};
using Kernel = std::variant<ExpKernel, SineKernel, ZExpKernel>;

enum class SingularKind { Critical, Asymptotic };

struct SingularValue {
  SingularKind kind;
  cplx value;
};

class EntireMap {
 public:
  static EntireMap exp_affine(cplx a);
  static EntireMap exp_kappa(cplx kappa);
  static EntireMap exp_shift();
  static EntireMap sine();
  static EntireMap z_exp_z();
  static EntireMap sine_affine(double a);
  // z -> base(lambda z). Singular values are those of base.
  static EntireMap rescaled(const EntireMap& base, cplx lambda);

  Family family() const { return family_; }
  // a, kappa, a (real) or lambda depending on the family; 0 otherwise.
  cplx parameter() const { return param_; }
  const EntireMap* base() const { return base_.get(); }
  const Kernel& kernel() const { return kernel_; }
  bool is_exponential() const { return std::holds_alternative<ExpKernel>(kernel_); }
  std::string describe() const;

  cplx eval(cplx z) const;
  cplx derivative(cplx z) const;
  // f(zeta + u) - zeta, evaluated without cancellation when zeta is fixed.
  cplx displacement(cplx zeta, cplx u) const;
  // Taylor coefficients c_0..c_order of f about z0, from closed forms.
  std::vector<cplx> taylor(cplx z0, int order) const;

  std::vector<SingularValue> singular_values() const;
  // Critical points w with |w| <= radius, in increasing modulus.
  std::vector<cplx> critical_points(double radius) const;
  // Local degree of f at z (1 away from critical points).
  int local_degree(cplx z, double tol = 1e-9) const;

 private:
  EntireMap(Family family, cplx param, Kernel kernel,
            std::shared_ptr<const EntireMap> base = nullptr)
      : family_(family), param_(param), kernel_(kernel), base_(std::move(base)) {}

  Family family_;
  cplx param_;
  Kernel kernel_;
  std::shared_ptr<const EntireMap> base_;
};

template <class Fn>
decltype(auto) visit_kernel(const EntireMap& f, Fn&& fn) {
  return std::visit(std::forward<Fn>(fn), f.kernel());
}

inline cplx eval_kernel(const ExpKernel& k, cplx z) { return k.A * std::exp(k.B * z) + k.C; }
inline cplx eval_kernel(const SineKernel& k, cplx z) { return k.A * std::sin(k.B * z + k.C) + k.D; }
inline cplx eval_kernel(const ZExpKernel& k, cplx z) {
  cplx w = k.s * z;
  return w * std::exp(w);
}

// exp(w) - 1 without cancellation for small w.
cplx expm1(cplx w);

// |z| above this (or non-finite) counts as overflow.
inline constexpr double kOverflowModulus = 1e300;
inline bool overflowed(cplx z) {
  return !std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kOverflowModulus;
}

// An exponential map A e^{Bz} + C is affinely conjugate to
// E(xi) = e^xi + kappa through xi = B z + log(AB).
struct ExpNormalForm {
  cplx kappa;
  cplx B;
  cplx offset;  // log(AB)
  cplx to_normal(cplx z) const { return B * z + offset; }
  cplx from_normal(cplx xi) const { return (xi - offset) / B; }
};

ExpNormalForm exp_normal_form(const EntireMap& f);

// Inverse branch of f indexed by k: logarithm branches (strip k) for the
// exponential kernel, k pi + (-1)^k asin for the sine kernel.
// UnsupportedMap for z e^z.
cplx inverse_branch(const EntireMap& f, cplx w, long k);

// Distance from w to the nearest singular value.
double distance_to_singular_values(const EntireMap& f, cplx w);

struct OrbitSample {
  cplx start;
  std::vector<cplx> points;  // points[0] == start
  bool escaped = false;
  std::optional<std::size_t> escape_index;
  double bailout_radius = 0;
};

// Forward orbit of length n (n+1 points) unless |z| exceeds bailout first.
OrbitSample iterate(const EntireMap& f, cplx z, std::size_t n, double bailout);

struct ContinuationOptions {
  double clearance = 1e-6;
  double step_factor = 0.25;
  int max_newton = 30;
  int max_refinements = 20;
  double start_tolerance = 1e-10;
  double residual_tolerance = 1e-10;
};

struct BranchContinuation {
  std::vector<cplx> target_path;     // refined copy of the input path
  std::vector<cplx> preimage_path;   // f(preimage_path[i]) == target_path[i]
  double max_newton_residual = 0;    // relative to max(1, |w|)
};

// Lifts the polyline `path` through f starting at z_start, which must
// satisfy f(z_start) == path[0]. The path must keep clear of singular values.
BranchContinuation continue_branch(const EntireMap& f, std::span<const cplx> path,
                                   cplx z_start, const ContinuationOptions& options = {});

}  // namespace gfdyn
