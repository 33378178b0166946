// Thin pybind11 layer. Exact values cross the boundary as "p/q" strings and structured
// results as JSON text; the Python package turns them into Fractions and dicts.

#include "toruslab/bad_sets.hpp"
#include "toruslab/birkhoff_sums.hpp"
#include "toruslab/classifiers.hpp"
#include "toruslab/flow_dynamics.hpp"
#include "toruslab/lab.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace toruslab;

namespace {

std::optional<Mode> mode_of(const std::string& m)
{
    if (m.empty() || m == "auto")
        return std::nullopt;
    return parse_mode(m);
}

TorusPoint point_of(const std::pair<std::string, std::string>& p)
{
    return {frac(parse_rational(p.first)), frac(parse_rational(p.second))};
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.attr("__version__") = kToolVersion;

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result(
        [&]() { return py::exception<Error>(m, "ToruslabError"); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error_type.get_stored(), to_json(e).dump().c_str());
        }
    });

    m.def("angle_json", [](const std::string& spec) { return to_json(named_angle(spec)).dump(); },
          py::arg("spec"));

    m.def("birkhoff_sum",
          [](const std::string& spec, const std::string& x, std::int64_t n) {
              return to_fraction(birkhoff_sum(named_angle(spec), parse_rational(x), n));
          },
          py::arg("spec"), py::arg("x"), py::arg("n"));

    m.def("birkhoff_sum_double",
          [](const std::string& spec, const std::string& x, std::int64_t n) {
              DoubleSum s = birkhoff_sum_double(named_angle(spec), parse_rational(x), n);
              return py::make_tuple(s.value, s.rel_error_bound, s.condition_flag);
          },
          py::arg("spec"), py::arg("x"), py::arg("n"));

    m.def("theta",
          [](const std::string& spec, const std::string& x, const std::string& beta, std::int64_t n) {
              return to_fraction(theta(named_angle(spec), parse_rational(x), parse_rational(beta), n));
          },
          py::arg("spec"), py::arg("x"), py::arg("beta"), py::arg("n"));

    m.def("e_measure",
          [](const std::string& spec, int n, std::int64_t ell) {
              return to_fraction(build_E(named_angle(spec), n, ell).measure());
          },
          py::arg("spec"), py::arg("n"), py::arg("ell"));

    m.def("verify",
          [](const std::string& tag, int samples, std::uint64_t seed, const std::string& params,
             const std::string& mode) {
              VerifyConfig cfg;
              cfg.samples = samples;
              cfg.seed = seed;
              cfg.mode = mode_of(mode);
              cfg.params = Json::parse(params.empty() ? "{}" : params);
              if (cfg.params.contains("quotients")) {
                  cfg.quotients = parse_quotients(cfg.params["quotients"].get<std::string>());
                  cfg.params.erase("quotients");
              }
              VerifyReport r;
              {
                  py::gil_scoped_release release;
                  r = verify_suite(tag, cfg);
              }
              return to_json(r).dump();
          },
          py::arg("tag"), py::arg("samples") = 0, py::arg("seed") = 1, py::arg("params") = "",
          py::arg("mode") = "");

    m.def("verify_tags", &verify_tags);

    m.def("classify",
          [](const std::string& spec, std::pair<std::string, std::string> p,
             std::pair<std::string, std::string> q, double d_p, double d_q, int depth) {
              Angle a = named_angle(spec);
              FlowParams fp{a, point_of(p), point_of(q), d_p, d_q};
              return to_json(regime_verdict(a, fp, depth < 0 ? a.horizon() : depth)).dump();
          },
          py::arg("spec"), py::arg("p"), py::arg("q"), py::arg("d_p") = 1.0, py::arg("d_q") = 1.0,
          py::arg("depth") = -1);

    m.def("kappa",
          [](double a, double b, double c, double delta, double y) {
              KappaResult k = kappa_quadratic(a, b, c, delta, y);
              return py::dict(py::arg("closed_form") = k.closed_form,
                              py::arg("quadrature") = k.quadrature,
                              py::arg("quadrature_error") = k.quadrature_error,
                              py::arg("residual") = k.residual);
          },
          py::arg("a"), py::arg("b"), py::arg("c"), py::arg("delta"), py::arg("y"));

    m.def("mu_infinity",
          [](double d_p, double d_q) {
              MuInfinity mu = mu_infinity(d_p, d_q);
              return py::make_tuple(mu.weight_p, mu.weight_q);
          },
          py::arg("d_p"), py::arg("d_q"));

    m.def("preset_names", &preset_names);

    m.def("run_preset",
          [](const std::string& name, const std::string& overrides, const std::string& out_dir) {
              Json o = Json::parse(overrides.empty() ? "{}" : overrides);
              RunManifest man;
              {
                  py::gil_scoped_release release;
                  man = run_preset(name, o, out_dir);
              }
              return to_json(man).dump();
          },
          py::arg("name"), py::arg("overrides") = "", py::arg("out_dir"));

    m.def("replay",
          [](const std::string& manifest, const std::string& out_dir) {
              ReplayResult r;
              {
                  py::gil_scoped_release release;
                  r = replay_manifest(manifest, out_dir);
              }
              return py::make_tuple(r.identical, r.mismatches);
          },
          py::arg("manifest"), py::arg("out_dir"));

    m.def("sweep_csv",
          [](const std::string& grid, int threads) {
              Json g = Json::parse(grid);
              std::vector<SweepRow> rows;
              {
                  py::gil_scoped_release release;
                  rows = sweep(g, threads);
              }
              return sweep_csv(rows);
          },
          py::arg("grid"), py::arg("threads") = 0);
}
