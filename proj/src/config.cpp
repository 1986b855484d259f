#include "gfdyn/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gfdyn/error.hpp"
#include "gfdyn/examples.hpp"

namespace gfdyn::app {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw DynamicsError(ErrorKind::ConfigError, field + ": " + what);
}

// Reads one JSON object, remembering which keys were consumed so that
// unknown keys can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  void get(const std::string& key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected a number or null");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, std::size_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(field(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void get(const std::string& key, std::uint64_t& out, int) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const std::string& key, unsigned& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(field(key), "expected a non-negative integer");
      out = v->get<unsigned>();
    }
  }
  void get(const std::string& key, long& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) fail(field(key), "expected an integer");
      out = v->get<long>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::optional<std::string>& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string or null");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, cplx& out) {
    if (auto* v = find(key)) out = complex_from_json(*v, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void section(Section& parent, const std::string& key, F&& body) {
  if (const json* v = parent.find(key)) {
    Section s(*v, parent.field(key));
    body(s);
    s.finish();
  }
}

void positive(double v, const std::string& field) {
  if (!(v > 0) || !std::isfinite(v)) fail(field, "must be positive and finite");
}

void nonzero(std::size_t v, const std::string& field) {
  if (v == 0) fail(field, "must be at least 1");
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json complex_to_json(cplx z) {
  if (z.imag() == 0) return z.real();
  return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(field, "expected a number or [re, im]");
}

EntireMap MapSpec::build() const {
  if (family == "ExpAffine") return EntireMap::exp_affine(a);
  if (family == "ExpKappa") return EntireMap::exp_kappa(kappa);
  if (family == "ExpShift") return EntireMap::exp_shift();
  if (family == "Sine") return EntireMap::sine();
  if (family == "ZExpZ") return EntireMap::z_exp_z();
  if (family == "SineAffine") return EntireMap::sine_affine(sine_affine_a.value_or(sine_affine_parameter()));
  fail("map.family", "unknown family '" + family + "'");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Section root(j, "");
  section(root, "map", [&](Section& s) {
    s.get("family", c.map.family);
    s.get("a", c.map.a);
    s.get("kappa", c.map.kappa);
    s.get("sine_affine_a", c.map.sine_affine_a);
  });
  root.get("seed", c.seed, 0);
  root.get("threads", c.threads);
  section(root, "petal", [&](Section& s) {
    auto& p = c.petal;
    s.get("inequality_samples", p.inequality_samples);
    s.get("radius_samples", p.radius_samples);
    s.get("radius_cap", p.radius_cap);
    s.get("cascade_orbits", p.cascade_orbits);
    s.get("cascade_start_min", p.cascade_start_min);
    s.get("cascade_start_max", p.cascade_start_max);
    s.get("cascade_cap", p.cascade_cap);
    s.get("chart_samples", p.chart_samples);
    s.get("abel_tolerance", p.abel_tolerance);
    s.get("truncation", p.truncation);
  });
  section(root, "metric", [&](Section& s) {
    auto& m = c.metric;
    s.get("near_samples", m.near_samples);
    s.get("far_samples", m.far_samples);
    s.get("eps_samples", m.eps_samples);
    s.get("outer_factor", m.outer_factor);
    s.get("max_conservative_failure", m.max_conservative_failure);
    s.get("eps_sigma", m.eps_sigma);
  });
  section(root, "semiconj", [&](Section& s) {
    auto& m = c.semiconj;
    s.get("samples", m.samples);
    s.get("levels", m.levels);
    s.get("safety", m.safety);
    s.get("residual_tolerance", m.residual_tolerance);
    s.get("tau_min", m.tau_min);
    s.get("max_drop_rate", m.max_drop_rate);
    s.get("address_bound", m.address_bound);
    s.get("prefix_length", m.prefix_length);
    s.get("parabolic_tail_fraction", m.parabolic_tail_fraction);
  });
  section(root, "ray", [&](Section& s) {
    auto& r = c.ray;
    s.get("addresses", r.addresses);
    s.get("potential", r.potential);
    s.get("address_bound", r.address_bound);
    s.get("depth", r.depth);
    s.get("endpoint_levels", r.endpoint_levels);
    s.get("partition_address", r.partition_address);
  });
  section(root, "render", [&](Section& s) {
    auto& r = c.render;
    s.get("center", r.center);
    s.get("width", r.width);
    s.get("width_px", r.width_px);
    s.get("height_px", r.height_px);
    s.get("max_iter", r.max_iter);
    s.get("bailout", r.bailout);
    s.get("tile", r.tile);
    s.get("sector_radius", r.sector_radius);
    s.get("png", r.png);
  });
  root.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("--config", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(path, e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["map"] = {{"family", c.map.family},
              {"a", complex_to_json(c.map.a)},
              {"kappa", complex_to_json(c.map.kappa)},
              {"sine_affine_a", opt(c.map.sine_affine_a)}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  const auto& p = c.petal;
  j["petal"] = {{"inequality_samples", p.inequality_samples}, {"radius_samples", p.radius_samples},
                {"radius_cap", p.radius_cap},                 {"cascade_orbits", p.cascade_orbits},
                {"cascade_start_min", p.cascade_start_min},   {"cascade_start_max", p.cascade_start_max},
                {"cascade_cap", p.cascade_cap},               {"chart_samples", p.chart_samples},
                {"abel_tolerance", p.abel_tolerance},         {"truncation", p.truncation}};
  const auto& m = c.metric;
  j["metric"] = {{"near_samples", m.near_samples},   {"far_samples", m.far_samples},
                 {"eps_samples", m.eps_samples},     {"outer_factor", m.outer_factor},
                 {"max_conservative_failure", m.max_conservative_failure},
                 {"eps_sigma", opt(m.eps_sigma)}};
  const auto& s = c.semiconj;
  j["semiconj"] = {{"samples", s.samples},
                   {"levels", s.levels},
                   {"safety", s.safety},
                   {"residual_tolerance", s.residual_tolerance},
                   {"tau_min", s.tau_min},
                   {"max_drop_rate", s.max_drop_rate},
                   {"address_bound", s.address_bound},
                   {"prefix_length", s.prefix_length},
                   {"parabolic_tail_fraction", s.parabolic_tail_fraction}};
  const auto& r = c.ray;
  j["ray"] = {{"addresses", r.addresses},         {"potential", r.potential},
              {"address_bound", r.address_bound}, {"depth", r.depth},
              {"endpoint_levels", r.endpoint_levels}, {"partition_address", opt(r.partition_address)}};
  const auto& v = c.render;
  j["render"] = {{"center", complex_to_json(v.center)},
                 {"width", v.width},
                 {"width_px", v.width_px},
                 {"height_px", v.height_px},
                 {"max_iter", v.max_iter},
                 {"bailout", v.bailout},
                 {"tile", v.tile},
                 {"sector_radius", opt(v.sector_radius)},
                 {"png", v.png}};
  return j;
}

void validate(const ExperimentConfig& c) {
  const auto& p = c.petal;
  nonzero(p.inequality_samples, "petal.inequality_samples");
  nonzero(p.radius_samples, "petal.radius_samples");
  positive(p.radius_cap, "petal.radius_cap");
  positive(p.cascade_start_min, "petal.cascade_start_min");
  positive(p.cascade_start_max, "petal.cascade_start_max");
  if (!(p.cascade_start_min < p.cascade_start_max) || p.cascade_start_max >= 1)
    fail("petal.cascade_start_max", "need cascade_start_min < cascade_start_max < 1");
  nonzero(p.cascade_cap, "petal.cascade_cap");
  positive(p.abel_tolerance, "petal.abel_tolerance");
  nonzero(p.truncation, "petal.truncation");

  const auto& m = c.metric;
  nonzero(m.near_samples, "metric.near_samples");
  nonzero(m.far_samples, "metric.far_samples");
  nonzero(m.eps_samples, "metric.eps_samples");
  if (!(m.outer_factor > 1)) fail("metric.outer_factor", "must exceed 1");
  positive(m.max_conservative_failure, "metric.max_conservative_failure");
  if (m.eps_sigma) positive(*m.eps_sigma, "metric.eps_sigma");

  const auto& s = c.semiconj;
  nonzero(s.samples, "semiconj.samples");
  nonzero(s.levels, "semiconj.levels");
  if (!(s.safety >= 1)) fail("semiconj.safety", "must be at least 1");
  positive(s.residual_tolerance, "semiconj.residual_tolerance");
  positive(s.tau_min, "semiconj.tau_min");
  positive(s.max_drop_rate, "semiconj.max_drop_rate");
  if (s.address_bound < 0) fail("semiconj.address_bound", "must be non-negative");
  if (!(s.parabolic_tail_fraction >= 0 && s.parabolic_tail_fraction <= 1))
    fail("semiconj.parabolic_tail_fraction", "must lie in [0, 1]");

  const auto& r = c.ray;
  nonzero(r.addresses, "ray.addresses");
  positive(r.potential, "ray.potential");
  if (r.address_bound < 1) fail("ray.address_bound", "must be at least 1");
  nonzero(r.depth, "ray.depth");
  nonzero(r.endpoint_levels, "ray.endpoint_levels");

  const auto& v = c.render;
  positive(v.width, "render.width");
  nonzero(v.width_px, "render.width_px");
  nonzero(v.height_px, "render.height_px");
  nonzero(v.max_iter, "render.max_iter");
  positive(v.bailout, "render.bailout");
  nonzero(v.tile, "render.tile");
  if (v.sector_radius) positive(*v.sector_radius, "render.sector_radius");
  if (v.png.empty()) fail("render.png", "must not be empty");

  // Catches bad family names and parameters at load time.
  (void)c.map.build();
}

}  // namespace gfdyn::app
