#include "gfdyn/rays.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gfdyn {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kTwoPiI(0, 2 * std::numbers::pi);

cplx log_branch(const ExpNormalForm& nf, cplx w, long k) {
  return std::log(w - nf.kappa) + kTwoPiI * static_cast<double>(k);
}

cplx exp_step(const ExpNormalForm& nf, cplx xi) { return std::exp(xi) + nf.kappa; }

void check_bound(const ExternalAddress& a, long bound) {
  auto bad = [bound](long s) { return std::labs(s) > bound; };
  if (std::any_of(a.prefix.begin(), a.prefix.end(), bad) || std::any_of(a.period.begin(), a.period.end(), bad))
    throw DynamicsError(ErrorKind::NonAdmissible, "address entries exceed the configured bound");
}

long strip_index(double im) { return std::lround(im / (2 * kPi)); }

// Periodic points p_i of the tail, p_i = L_{per_i}(p_{i+1 mod q}), in
// normal-form coordinates.
std::vector<cplx> periodic_cycle(const ExpNormalForm& nf, const std::vector<long>& period) {
  const std::size_t q = period.size();
  cplx x(30.0, 2 * kPi * period[0]);
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    cplx y = x;
    for (std::size_t i = q; i-- > 0;) y = log_branch(nf, y, period[i]);
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) break;
    bool done = std::abs(y - x) <= 1e-15 * std::max(1.0, std::abs(y));
    x = y;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw DynamicsError(ErrorKind::NoConvergence, "backward iteration did not settle on a periodic endpoint");
  std::vector<cplx> cyc(q);
  cyc[0] = x;
  for (std::size_t i = q; i-- > 1;) cyc[i] = log_branch(nf, i + 1 == q ? cyc[0] : cyc[i + 1], period[i]);
  return cyc;
}

// Orbit of the landing point in normal-form coordinates, entries 0..depth.
std::vector<cplx> endpoint_orbit(const ExpNormalForm& nf, const ExternalAddress& a, std::size_t depth) {
  if (!a.periodic_tail())
    throw DynamicsError(ErrorKind::PreconditionViolated, "landing points need a periodic tail");
  auto cyc = periodic_cycle(nf, a.period);
  const std::size_t m = a.prefix.size();
  std::vector<cplx> pre(m + 1);
  pre[m] = cyc[0];
  for (std::size_t i = m; i-- > 0;) pre[i] = log_branch(nf, pre[i + 1], a.prefix[i]);
  std::vector<cplx> out(depth + 1);
  for (std::size_t j = 0; j <= depth; ++j) out[j] = j <= m ? pre[j] : cyc[(j - m) % cyc.size()];
  return out;
}

}  // namespace

long ExternalAddress::operator[](std::size_t n) const {
  if (n < prefix.size()) return prefix[n];
  if (period.empty()) return 0;
  return period[(n - prefix.size()) % period.size()];
}

ExternalAddress ExternalAddress::shifted(std::size_t n) const {
  ExternalAddress out = *this;
  while (n-- > 0) {
    if (!out.prefix.empty()) {
      out.prefix.erase(out.prefix.begin());
    } else if (!out.period.empty()) {
      std::rotate(out.period.begin(), out.period.begin() + 1, out.period.end());
    }
  }
  return out;
}

std::string ExternalAddress::to_string() const {
  std::ostringstream os;
  for (long s : prefix) os << s << ' ';
  os << '(';
  for (std::size_t i = 0; i < period.size(); ++i) os << (i ? " " : "") << period[i];
  os << ')';
  return os.str();
}

ExternalAddress ExternalAddress::parse(const std::string& text) {
  ExternalAddress a;
  bool in_period = false;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size())
      throw DynamicsError(ErrorKind::ConfigError, "bad address entry '" + token + "'");
    (in_period ? a.period : a.prefix).push_back(v);
    token.clear();
  };
  bool closed = false;
  for (char c : text) {
    if (c == '(') {
      if (in_period || closed) throw DynamicsError(ErrorKind::ConfigError, "address has more than one period");
      flush();
      in_period = true;
    } else if (c == ')') {
      if (!in_period) throw DynamicsError(ErrorKind::ConfigError, "unbalanced ')' in address");
      flush();
      in_period = false;
      closed = true;
    } else if (closed && c != ' ' && c != '\t') {
      throw DynamicsError(ErrorKind::ConfigError, "entries after the period in address '" + text + "'");
    } else if (c == ' ' || c == ',' || c == '\t') {
      flush();
    } else {
      token += c;
    }
  }
  if (in_period) throw DynamicsError(ErrorKind::ConfigError, "unclosed period in address '" + text + "'");
  flush();
  if (a.period.empty()) a.period = {0};
  return a;
}

int compare_addresses(const ExternalAddress& a, const ExternalAddress& b, std::size_t horizon) {
  for (std::size_t n = 0; n < horizon; ++n) {
    if (a[n] < b[n]) return -1;
    if (a[n] > b[n]) return 1;
  }
  return 0;
}

RayTrace trace_ray(const EntireMap& f, const ExternalAddress& address, std::span<const double> potentials,
                   const RayOptions& opt) {
  const ExpNormalForm nf = exp_normal_form(f);
  check_bound(address, opt.address_bound);
  RayTrace trace;
  trace.address = address;
  for (double t : potentials) {
    if (!(t > 0)) throw DynamicsError(ErrorKind::PreconditionViolated, "potential must be positive");
    double tn = t;
    std::size_t n = 0;
    while (tn < opt.start_potential) {
      if (n >= opt.depth)
        throw DynamicsError(ErrorKind::DepthInsufficient, "potential too small for the pullback depth");
      tn = potential_step(tn);
      ++n;
    }
    cplx xi(tn, 2 * kPi * address[n]);
    for (std::size_t m = n; m-- > 0;) xi = log_branch(nf, xi, address[m]);

    // Forward iteration must reproduce the address. Stop once the
    // accumulated expansion would swamp rounding errors.
    RayPoint pt;
    pt.t = t;
    pt.depth_used = n;
    pt.z = nf.from_normal(xi);
    cplx x = xi;
    double log_amp = 0;
    for (std::size_t j = 0; j < opt.certify_steps; ++j) {
      if (strip_index(x.imag()) != address[j])
        throw DynamicsError(ErrorKind::DepthInsufficient, "forward iteration does not certify the address",
                            pt.z);
      ++pt.certified_steps;
      log_amp += std::max(0.0, x.real());
      if (log_amp > 25 || x.real() > 700) break;
      x = exp_step(nf, x);
    }
    trace.points.push_back(pt);
  }
  return trace;
}

cplx ray_endpoint(const EntireMap& f, const ExternalAddress& address) {
  const ExpNormalForm nf = exp_normal_form(f);
  return nf.from_normal(endpoint_orbit(nf, address, 0)[0]);
}

namespace {

// Argument of (ray point - kappa) as a function of log-modulus, sampled
// along the traced ray and unwrapped.
struct CutCurve {
  std::vector<double> log_mod;
  std::vector<double> arg;

  double angle_at(double lm) const {
    if (lm <= log_mod.front()) return arg.front();
    if (lm >= log_mod.back()) return arg.back();
    auto it = std::upper_bound(log_mod.begin(), log_mod.end(), lm);
    std::size_t i = static_cast<std::size_t>(it - log_mod.begin());
    double w = (lm - log_mod[i - 1]) / (log_mod[i] - log_mod[i - 1]);
    return arg[i - 1] + w * (arg[i] - arg[i - 1]);
  }
};

CutCurve build_cut(const EntireMap& f, const ExpNormalForm& nf, const Partition& part) {
  RayOptions opt;
  opt.address_bound = 1L << 40;
  RayTrace tr = trace_ray(f, *part.ray_address, part.ray_potentials, opt);
  CutCurve c;
  double prev = 0;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    cplx d = nf.to_normal(tr.points[i].z) - nf.kappa;
    double a = std::arg(d);
    if (i > 0) a += 2 * kPi * std::round((prev - a) / (2 * kPi));
    prev = a;
    double lm = std::log(std::abs(d));
    if (!c.log_mod.empty() && lm <= c.log_mod.back()) continue;
    c.log_mod.push_back(lm);
    c.arg.push_back(a);
  }
  if (c.log_mod.empty()) throw DynamicsError(ErrorKind::NoConvergence, "could not trace the partition ray");
  return c;
}

}  // namespace

std::vector<long> itinerary(const EntireMap& f, cplx z, const Partition& part, std::size_t depth, double tol) {
  const ExpNormalForm nf = exp_normal_form(f);
  std::optional<CutCurve> cut;
  if (part.ray_address) cut = build_cut(f, nf, part);
  std::vector<long> out;
  cplx xi = nf.to_normal(z);
  for (std::size_t j = 0; j < depth; ++j) {
    if (overflowed(xi)) throw DynamicsError(ErrorKind::Overflow, "orbit overflows before the requested depth", z);
    double theta = cut ? cut->angle_at(xi.real()) : -kPi;
    double x = (xi.imag() - theta) / (2 * kPi);
    double k = std::floor(x);
    double frac = x - k;
    if (std::min(frac, 1 - frac) * 2 * kPi < tol)
      throw DynamicsError(ErrorKind::OrbitHitsPartitionBoundary, "orbit point on a partition boundary",
                          nf.from_normal(xi));
    out.push_back(static_cast<long>(k));
    xi = exp_step(nf, xi);
  }
  return out;
}

std::vector<long> symbolic_itinerary(const ExternalAddress& address, const Partition& part, std::size_t depth) {
  std::vector<long> out;
  for (std::size_t n = 0; n < depth; ++n) {
    if (!part.ray_address) {
      out.push_back(address[n]);
      continue;
    }
    int c = compare_addresses(address.shifted(n + 1), *part.ray_address);
    if (c == 0) throw DynamicsError(ErrorKind::OrbitHitsPartitionBoundary, "address lies on a boundary ray");
    out.push_back(c > 0 ? address[n] : address[n] - 1);
  }
  return out;
}

PullbackSample endpoint_sample(const EntireMap& g, const ExternalAddress& address, std::size_t depth) {
  exp_normal_form(g);
  return symbolic_sample(g, address.prefix, address.period, depth);
}

PullbackSample ray_point_sample(const EntireMap& g, const ExternalAddress& address, double t, std::size_t depth) {
  double pot[1] = {t};
  RayOptions opt;
  opt.address_bound = 1L << 40;
  RayTrace tr = trace_ray(g, address, pot, opt);
  PullbackSample s = forward_sample(g, tr.points[0].z, depth);
  s.label = address.to_string() + " @ t=" + std::to_string(t);
  return s;
}

}  // namespace gfdyn
