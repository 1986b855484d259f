#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gfdyn/app/commands.hpp"
#include "gfdyn/app/config.hpp"
#include "gfdyn/examples.hpp"
#include "gfdyn/metrics.hpp"
#include "gfdyn/parabolic.hpp"
#include "gfdyn/render.hpp"

namespace py = pybind11;
using namespace gfdyn;

namespace {

// Configs cross the boundary as JSON text; the python side handles dicts.
app::ExperimentConfig config_from(const std::string& text) {
  app::json j;
  try {
    j = app::json::parse(text, nullptr, true, true);
  } catch (const app::json::parse_error& e) {
    throw DynamicsError(ErrorKind::ConfigError, std::string("config: ") + e.what());
  }
  auto cfg = app::parse_config(j);
  app::validate(cfg);
  return cfg;
}

py::dict germ_dict(const ParabolicGerm& g) {
  py::dict d;
  d["zeta"] = g.zeta;
  d["p"] = g.p;
  d["a"] = g.a;
  d["repelling"] = g.repelling;
  d["attracting"] = g.attracting;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parabolic dynamics of transcendental entire maps";

  // Leaked on purpose: the translator can run during interpreter shutdown.
  static auto* dyn_error = new py::exception<DynamicsError>(m, "DynamicsError", PyExc_RuntimeError);
  static auto* config_error = new py::exception<DynamicsError>(m, "ConfigError", dyn_error->ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DynamicsError& e) {
      if (e.kind() == ErrorKind::ConfigError)
        py::set_error(*config_error, e.what());
      else
        py::set_error(*dyn_error, e.what());
    }
  });

  py::class_<EntireMap>(m, "EntireMap")
      .def_static("exp_affine", &EntireMap::exp_affine, py::arg("a"))
      .def_static("exp_kappa", &EntireMap::exp_kappa, py::arg("kappa"))
      .def_static("exp_shift", &EntireMap::exp_shift)
      .def_static("sine", &EntireMap::sine)
      .def_static("z_exp_z", &EntireMap::z_exp_z)
      .def_static("sine_affine", &EntireMap::sine_affine, py::arg("a"))
      .def_static("rescaled", &EntireMap::rescaled, py::arg("base"), py::arg("lam"))
      .def("__call__", &EntireMap::eval)
      .def("derivative", &EntireMap::derivative)
      .def("taylor", &EntireMap::taylor, py::arg("z0"), py::arg("order"))
      .def("singular_values",
           [](const EntireMap& f) {
             std::vector<cplx> out;
             for (const auto& s : f.singular_values()) out.push_back(s.value);
             return out;
           })
      .def("inverse_branch", [](const EntireMap& f, cplx w, long k) { return inverse_branch(f, w, k); })
      .def_property_readonly("family", [](const EntireMap& f) { return std::string(to_string(f.family())); })
      .def("__repr__", &EntireMap::describe);

  m.def("sine_affine_parameter", &sine_affine_parameter);
  m.def("standard_examples", [] {
    py::dict d;
    for (const auto& e : standard_examples()) d[py::str(e.id)] = e.map;
    return d;
  });
  m.def("parabolic_points", [](const EntireMap& f) { return parabolic_points(f); });
  m.def("fit_germ", [](const EntireMap& f, cplx zeta) { return germ_dict(fit_germ(f, zeta)); });
  m.def("validated_radius",
        [](const EntireMap& f, cplx zeta, std::size_t samples, double cap, std::uint64_t seed) {
          return validated_radius(f, fit_germ(f, zeta), samples, cap, seed);
        },
        py::arg("f"), py::arg("zeta"), py::arg("samples") = 10000, py::arg("cap") = 0.2, py::arg("seed") = 0);
  m.def("ramification_data", [](const EntireMap& f) {
    RamificationData r = ramification_data(f);
    py::dict d;
    d["n_sigma"] = r.n_sigma;
    d["s"] = r.s;
    return d;
  });

  m.def("run_command",
        [](const std::string& name, const std::string& config_json, const std::string& out_dir) {
          auto cfg = config_from(config_json);
          app::Report rep;
          {
            py::gil_scoped_release release;
            rep = app::run_command(name, cfg, out_dir);
          }
          return rep.to_json().dump();
        },
        py::arg("name"), py::arg("config_json") = "{}", py::arg("out_dir") = "",
        "Runs a subcommand and returns its report as JSON text.");
  m.attr("commands") = app::kCommands;

  m.def("render",
        [](const std::string& config_json, unsigned threads) {
          auto cfg = config_from(config_json);
          const EntireMap f = cfg.map.build();
          const auto& rs = cfg.render;
          double radius = rs.sector_radius.value_or(0);
          if (!rs.sector_radius) {
            radius = cfg.petal.radius_cap;
            for (cplx z : parabolic_points(f))
              radius = std::min(radius, validated_radius(f, fit_germ(f, z), cfg.petal.radius_samples,
                                                         cfg.petal.radius_cap, cfg.seed));
            radius /= 2;
          }
          RenderJob job{f, {rs.center, rs.width, rs.width_px, rs.height_px}, rs.max_iter, rs.bailout,
                        parabolic_targets(f, radius), rs.tile, threads};
          RenderResult res;
          {
            py::gil_scoped_release release;
            res = render(job);
          }
          py::bytes rgb(reinterpret_cast<const char*>(res.rgb.data()), res.rgb.size());
          return py::make_tuple(rgb, res.width, res.height, res.hash);
        },
        py::arg("config_json") = "{}", py::arg("threads") = 1,
        "Returns (rgb bytes, width, height, hash) for the render section of a config.");
}
