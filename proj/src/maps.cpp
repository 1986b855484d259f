#include "gfdyn/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int k) {
  double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

Kernel rescale(const Kernel& k, cplx lambda) {
  return std::visit(
      [&](const auto& kk) -> Kernel {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          return ExpKernel{kk.A, kk.B * lambda, kk.C};
        } else if constexpr (std::is_same_v<T, SineKernel>) {
          return SineKernel{kk.A, kk.B * lambda, kk.C, kk.D};
        } else {
          return ZExpKernel{kk.s * lambda};
        }
      },
      k);
}

std::string format_cplx(cplx z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real();
  if (z.imag() != 0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::ExpAffine: return "ExpAffine";
    case Family::ExpKappa: return "ExpKappa";
    case Family::ExpShift: return "ExpShift";
    case Family::Sine: return "Sine";
    case Family::ZExpZ: return "ZExpZ";
    case Family::SineAffine: return "SineAffine";
    case Family::Rescaled: return "Rescaled";
  }
  return "Unknown";
}

cplx expm1(cplx w) {
  const double x = w.real(), y = w.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

EntireMap EntireMap::exp_affine(cplx a) {
  if (a == cplx(0)) throw DynamicsError(ErrorKind::ConfigError, "ExpAffine needs a != 0");
  return EntireMap(Family::ExpAffine, a, ExpKernel{a, 1.0, 0.0});
}

EntireMap EntireMap::exp_kappa(cplx kappa) {
  return EntireMap(Family::ExpKappa, kappa, ExpKernel{1.0, 1.0, kappa});
}

EntireMap EntireMap::exp_shift() {
  return EntireMap(Family::ExpShift, 0.0, ExpKernel{std::exp(-1.0), 1.0, 0.0});
}

EntireMap EntireMap::sine() { return EntireMap(Family::Sine, 0.0, SineKernel{1.0, 1.0, 0.0, 0.0}); }

EntireMap EntireMap::z_exp_z() { return EntireMap(Family::ZExpZ, 0.0, ZExpKernel{1.0}); }

EntireMap EntireMap::sine_affine(double a) {
  const double c = std::cos(a);
  if (!(std::abs(a) < kPi / 2) || std::abs(c) < 1e-12)
    throw DynamicsError(ErrorKind::ConfigError, "SineAffine needs |a| < pi/2");
  // D = -A sin(C) with the same roundings as the kernel, so f(0) == 0 exactly.
  const double A = 1.0 / c;
  return EntireMap(Family::SineAffine, a, SineKernel{A, 1.0, a, -(A * std::sin(a))});
}

EntireMap EntireMap::rescaled(const EntireMap& base, cplx lambda) {
  if (lambda == cplx(0)) throw DynamicsError(ErrorKind::ConfigError, "rescaling factor must be nonzero");
  return EntireMap(Family::Rescaled, lambda, rescale(base.kernel_, lambda),
                   std::make_shared<const EntireMap>(base));
}

std::string EntireMap::describe() const {
  switch (family_) {
    case Family::ExpAffine: return "ExpAffine(a=" + format_cplx(param_) + ")";
    case Family::ExpKappa: return "ExpKappa(kappa=" + format_cplx(param_) + ")";
    case Family::SineAffine: return "SineAffine(a=" + format_cplx(param_) + ")";
    case Family::Rescaled:
      return "Rescaled(" + base_->describe() + ", lambda=" + format_cplx(param_) + ")";
    default: return std::string(to_string(family_));
  }
}

cplx EntireMap::eval(cplx z) const {
  return std::visit([z](const auto& k) { return eval_kernel(k, z); }, kernel_);
}

cplx EntireMap::derivative(cplx z) const {
  return std::visit(
      [z](const auto& k) -> cplx {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          return k.A * k.B * std::exp(k.B * z);
        } else if constexpr (std::is_same_v<T, SineKernel>) {
          return k.A * k.B * std::cos(k.B * z + k.C);
        } else {
          cplx w = k.s * z;
          return k.s * (1.0 + w) * std::exp(w);
        }
      },
      kernel_);
}

cplx EntireMap::displacement(cplx zeta, cplx u) const {
  return std::visit(
      [&](const auto& k) -> cplx {
        using T = std::decay_t<decltype(k)>;
        const cplx offset = eval_kernel(k, zeta) - zeta;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          return offset + k.A * std::exp(k.B * zeta) * expm1(k.B * u);
        } else if constexpr (std::is_same_v<T, SineKernel>) {
          cplx h = 0.5 * k.B * u;
          return offset + 2.0 * k.A * std::cos(k.B * zeta + k.C + h) * std::sin(h);
        } else {
          cplx w0 = k.s * zeta;
          return offset + w0 * std::exp(w0) * expm1(k.s * u) + k.s * u * std::exp(k.s * (zeta + u));
        }
      },
      kernel_);
}

std::vector<cplx> EntireMap::taylor(cplx z0, int order) const {
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        for (int n = 0; n <= order; ++n) {
          cplx d;
          if constexpr (std::is_same_v<T, ExpKernel>) {
            d = k.A * std::pow(k.B, n) * std::exp(k.B * z0);
            if (n == 0) d += k.C;
          } else if constexpr (std::is_same_v<T, SineKernel>) {
            // Derivatives of sin cycle with period 4; index the cycle rather
            // than shifting the argument by n pi/2, which adds rounding.
            cplx x = k.B * z0 + k.C;
            cplx cyc[4] = {std::sin(x), std::cos(x), -std::sin(x), -std::cos(x)};
            d = k.A * std::pow(k.B, n) * cyc[n % 4];
            if (n == 0) d += k.D;
          } else {
            cplx w = k.s * z0;
            d = std::pow(k.s, n) * (w + static_cast<double>(n)) * std::exp(w);
          }
          c[static_cast<std::size_t>(n)] = d / factorial(n);
        }
      },
      kernel_);
  return c;
}

std::vector<SingularValue> EntireMap::singular_values() const {
  return std::visit(
      [](const auto& k) -> std::vector<SingularValue> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ExpKernel>) {
          return {{SingularKind::Asymptotic, k.C}};
        } else if constexpr (std::is_same_v<T, SineKernel>) {
          return {{SingularKind::Critical, k.D + k.A}, {SingularKind::Critical, k.D - k.A}};
        } else {
          return {{SingularKind::Asymptotic, 0.0}, {SingularKind::Critical, -std::exp(-1.0)}};
        }
      },
      kernel_);
}

std::vector<cplx> EntireMap::critical_points(double radius) const {
  std::vector<cplx> out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SineKernel>) {
          // B z + C = pi/2 + j pi
          double reach = radius * std::abs(k.B) + std::abs(k.C);
          long jmax = static_cast<long>(std::ceil(reach / kPi)) + 1;
          for (long j = -jmax; j <= jmax; ++j) {
            cplx z = (kPi / 2 + kPi * static_cast<double>(j) - k.C) / k.B;
            if (std::abs(z) <= radius) out.push_back(z);
          }
        } else if constexpr (std::is_same_v<T, ZExpKernel>) {
          cplx z = -1.0 / k.s;
          if (std::abs(z) <= radius) out.push_back(z);
        }
      },
      kernel_);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  return out;
}

int EntireMap::local_degree(cplx z, double tol) const {
  auto c = taylor(z, 8);
  for (int k = 1; k <= 8; ++k)
    if (std::abs(c[static_cast<std::size_t>(k)]) > tol) return k;
  return 9;
}

ExpNormalForm exp_normal_form(const EntireMap& f) {
  const auto* k = std::get_if<ExpKernel>(&f.kernel());
  if (!k) throw DynamicsError(ErrorKind::UnsupportedMap, "rays are implemented for exponential maps only");
  ExpNormalForm nf;
  nf.B = k->B;
  nf.offset = std::log(k->A * k->B);
  nf.kappa = k->B * k->C + nf.offset;
  return nf;
}

cplx inverse_branch(const EntireMap& f, cplx w, long k) {
  if (f.is_exponential()) {
    const ExpNormalForm nf = exp_normal_form(f);
    cplx xi = std::log(nf.to_normal(w) - nf.kappa) + cplx(0, 2 * kPi * static_cast<double>(k));
    return nf.from_normal(xi);
  }
  if (const auto* s = std::get_if<SineKernel>(&f.kernel())) {
    cplx x = std::asin((w - s->D) / s->A);
    cplx arg = kPi * static_cast<double>(k) + ((k % 2 == 0) ? x : -x);
    return (arg - s->C) / s->B;
  }
  throw DynamicsError(ErrorKind::UnsupportedMap, "no explicit inverse branches for this family");
}

double distance_to_singular_values(const EntireMap& f, cplx w) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& sv : f.singular_values()) d = std::min(d, std::abs(w - sv.value));
  return d;
}

OrbitSample iterate(const EntireMap& f, cplx z, std::size_t n, double bailout) {
  OrbitSample s;
  s.start = z;
  s.bailout_radius = bailout;
  s.points.reserve(n + 1);
  s.points.push_back(z);
  if (overflowed(z) || std::abs(z) > bailout) {
    s.escaped = true;
    s.escape_index = 0;
    return s;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    z = f.eval(z);
    s.points.push_back(z);
    if (overflowed(z) || std::abs(z) > bailout) {
      s.escaped = true;
      s.escape_index = i;
      break;
    }
  }
  return s;
}

namespace {

double segment_distance(cplx a, cplx b, cplx p) {
  cplx d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// One Newton solve of f(z) = w_next seeded from (z_prev, w_prev). Rejects
// solutions that jump further than the Koebe distortion bound allows,
// which is how a silent branch switch would show up.
bool newton_step(const EntireMap& f, cplx z_prev, cplx w_prev, cplx w_next,
                 const ContinuationOptions& opt, cplx& z_out, double& residual) {
  cplx d = f.derivative(z_prev);
  if (d == cplx(0) || overflowed(d)) return false;
  cplx dw = w_next - w_prev;
  cplx z = z_prev + dw / d;
  const double guard = 2.0 * std::abs(dw) / std::abs(d) + 1e-13 * (1.0 + std::abs(z_prev));
  const double scale = std::max(1.0, std::abs(w_next));
  double r = std::abs(f.eval(z) - w_next);
  for (int it = 0; it < opt.max_newton; ++it) {
    cplx F = f.eval(z) - w_next;
    r = std::abs(F);
    if (!std::isfinite(r)) return false;
    if (r <= 1e-15 * scale) break;
    cplx fp = f.derivative(z);
    if (fp == cplx(0) || overflowed(fp)) return false;
    cplx step = F / fp;
    z -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) {
      r = std::abs(f.eval(z) - w_next);
      break;
    }
  }
  r = std::abs(f.eval(z) - w_next);
  if (!(r <= opt.residual_tolerance * scale)) return false;
  if (std::abs(z - z_prev) > guard) return false;
  z_out = z;
  residual = r / scale;
  return true;
}

}  // namespace

BranchContinuation continue_branch(const EntireMap& f, std::span<const cplx> path, cplx z_start,
                                   const ContinuationOptions& opt) {
  if (path.empty()) throw DynamicsError(ErrorKind::PreconditionViolated, "empty path");
  const double start_scale = std::max(1.0, std::abs(path[0]));
  if (!(std::abs(f.eval(z_start) - path[0]) <= opt.start_tolerance * start_scale))
    throw DynamicsError(ErrorKind::PreconditionViolated, "f(z_start) does not match path start",
                        z_start);
  const auto svs = f.singular_values();
  for (std::size_t i = 0; i < path.size(); ++i) {
    cplx a = path[i];
    cplx b = i + 1 < path.size() ? path[i + 1] : path[i];
    for (const auto& sv : svs) {
      if (segment_distance(a, b, sv.value) <= opt.clearance)
        throw DynamicsError(ErrorKind::SingularValueOnPath,
                            "path passes within clearance of a singular value", sv.value);
    }
  }

  BranchContinuation out;
  out.target_path.push_back(path[0]);
  out.preimage_path.push_back(z_start);
  cplx w = path[0];
  cplx z = z_start;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const cplx target = path[i];
    while (w != target) {
      cplx delta = target - w;
      double max_step = opt.step_factor * distance_to_singular_values(f, w);
      cplx w_next = std::abs(delta) > max_step ? w + delta * (max_step / std::abs(delta)) : target;
      cplx z_next;
      double residual = 0;
      int refinements = 0;
      while (!newton_step(f, z, w, w_next, opt, z_next, residual)) {
        if (++refinements > opt.max_refinements)
          throw DynamicsError(ErrorKind::BranchLost, "Newton continuation failed after bisection", w);
        w_next = 0.5 * (w + w_next);
      }
      out.max_newton_residual = std::max(out.max_newton_residual, residual);
      w = (w_next == target || std::abs(w_next - target) == 0) ? target : w_next;
      z = z_next;
      out.target_path.push_back(w);
      out.preimage_path.push_back(z);
    }
  }
  return out;
}

}  // namespace gfdyn
