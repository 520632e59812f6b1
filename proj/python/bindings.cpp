#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "flatcover/engine.hpp"
#include "flatcover/estimate.hpp"
#include "flatcover/harness.hpp"
#include "flatcover/polyjson.hpp"

namespace py = pybind11;
using namespace flatcover;
using nlohmann::json;

namespace {

// Values cross the boundary as JSON text; the python wrapper parses it.
Polynomial poly(const std::string& text) { return polynomial_from_json(json::parse(text)); }

EngineConfig engine_config(double c_flat, double c_sub, bool strict) {
  EngineConfig cfg;
  cfg.c_flat = c_flat;
  cfg.c_sub = c_sub;
  cfg.strict = strict;
  return cfg;
}

std::string cover_json(const std::string& phi, const std::string& mode, double delta, double eps, double p,
                       std::optional<double> k, double c_flat, double c_sub, bool strict) {
  CoverRequest req;
  req.phi = poly(phi);
  req.mode = mode_from_string(mode);
  req.delta = delta;
  req.eps = eps;
  req.p = p;
  req.k = k;
  return to_json(build_cover(req, engine_config(c_flat, c_sub, strict))).dump();
}

std::string verify_json(const std::string& phi, const std::string& cover, double c_flat, double c_sub,
                        double raster, int overlap_bound, double budget_constant) {
  VerifyOptions opt;
  opt.c_flat = c_flat;
  opt.c_sub = c_sub;
  opt.raster = raster;
  opt.overlap_bound = overlap_bound;
  opt.budget_constant = budget_constant;
  return to_json(verify_cover(poly(phi), cover_from_json(json::parse(cover)), opt), false).dump();
}

EstimateOptions estimate_options(double p, double q, int trials, std::uint64_t seed,
                                 const std::vector<std::string>& portfolio) {
  EstimateOptions opt;
  opt.p = p;
  opt.q = q;
  opt.trials = trials;
  opt.seed = seed;
  if (!portfolio.empty()) {
    opt.portfolio.clear();
    for (const auto& s : portfolio) opt.portfolio.push_back(trial_from_string(s));
  }
  return opt;
}

std::string estimate_json(const std::string& phi, const std::string& cover, double p, double q, int trials,
                          std::uint64_t seed, const std::vector<std::string>& portfolio) {
  return to_json(estimate_ratio(poly(phi), cover_from_json(json::parse(cover)),
                                estimate_options(p, q, trials, seed, portfolio)))
      .dump();
}

std::string sweep_json(const std::string& phi, const std::vector<double>& deltas, const std::string& mode, double eps,
                       double p, double q, int trials, std::uint64_t seed, const std::vector<std::string>& portfolio) {
  return to_json(sweep(poly(phi), deltas, mode_from_string(mode), eps, estimate_options(p, q, trials, seed, portfolio)))
      .dump();
}

double eval_at(const std::string& phi, const std::vector<double>& x) { return eval(poly(phi), x); }

std::string hessian_json(const std::string& phi) { return to_json(hessian_det(poly(phi))).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flat and sublevel parallelogram covers of polynomial graphs";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<Unsupported>(m, "Unsupported", PyExc_NotImplementedError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);

  m.def("eval", &eval_at, py::arg("phi"), py::arg("x"));
  m.def("hessian_det", &hessian_json, py::arg("phi"));
  m.def("cover", &cover_json, py::arg("phi"), py::arg("mode"), py::arg("delta"), py::arg("eps") = 1.0,
        py::arg("p") = 4.0, py::arg("k") = py::none(), py::arg("c_flat") = 4.0, py::arg("c_sub") = 4.0,
        py::arg("strict") = true, py::call_guard<py::gil_scoped_release>());
  m.def("verify", &verify_json, py::arg("phi"), py::arg("cover"), py::arg("c_flat") = 4.0, py::arg("c_sub") = 4.0,
        py::arg("raster") = 0.25, py::arg("overlap_bound") = 8, py::arg("budget_constant") = 64.0,
        py::call_guard<py::gil_scoped_release>());
  m.def("estimate", &estimate_json, py::arg("phi"), py::arg("cover"), py::arg("p") = 4.0, py::arg("q") = 4.0,
        py::arg("trials") = 3, py::arg("seed") = 1, py::arg("portfolio") = std::vector<std::string>{},
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep", &sweep_json, py::arg("phi"), py::arg("deltas"), py::arg("mode"), py::arg("eps") = 0.5,
        py::arg("p") = 4.0, py::arg("q") = 4.0, py::arg("trials") = 3, py::arg("seed") = 1,
        py::arg("portfolio") = std::vector<std::string>{}, py::call_guard<py::gil_scoped_release>());
}
