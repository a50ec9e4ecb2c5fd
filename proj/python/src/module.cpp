#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "semiclassical/config.hpp"
#include "semiclassical/error.hpp"
#include "semiclassical/potentials.hpp"
#include "semiclassical/scenario_io.hpp"
#include "semiclassical/verify.hpp"
#ifdef SEMICLASSICAL_HAVE_CLI
#include "semiclassical/cli.hpp"
#endif

namespace py = pybind11;
using namespace semiclassical;

namespace {

std::vector<py::ssize_t> shape_of(const Grid& g) {
    std::vector<py::ssize_t> shape;
    for (std::size_t e : g.extents()) shape.push_back(static_cast<py::ssize_t>(e));
    return shape;
}

py::array_t<double> to_array(const ScalarField& f) {
    py::array_t<double> out(shape_of(f.grid()));
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

py::array_t<bool> to_array(const NodeMask& m, const Grid& g) {
    py::array_t<bool> out(shape_of(g));
    bool* p = out.mutable_data();
    for (std::size_t i = 0; i < g.size(); ++i) p[i] = m[i];
    return out;
}

ScalarField from_array(const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (static_cast<std::size_t>(a.size()) != g.size())
        throw FieldError("array has " + std::to_string(a.size()) + " values, grid has " + std::to_string(g.size()));
    return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

std::string report_json(const VerificationReport& r) { return r.to_json().dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semiclassical potentials from Helmholtz amplitudes";

    // Translators run newest first, so the base class is registered first.
    auto& base = py::register_exception<Error>(m, "SemiclassicalError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<GridError>(m, "GridError", base.ptr());
    py::register_exception<FieldError>(m, "FieldError", base.ptr());
    py::register_exception<ResonanceError>(m, "ResonanceError", base.ptr());
    py::register_exception<HelmholtzPreconditionError>(m, "HelmholtzPreconditionError", base.ptr());
    py::register_exception<DegenerateAmplitudeError>(m, "DegenerateAmplitudeError", base.ptr());

    py::class_<Grid>(m, "Grid")
        .def(py::init([](std::vector<std::size_t> extents, std::vector<double> origin, std::vector<double> spacing,
                         const std::string& boundary) {
                 return Grid(std::move(extents), std::move(origin), std::move(spacing), boundary_from_string(boundary));
             }),
             py::arg("extents"), py::arg("origin"), py::arg("spacing"), py::arg("boundary") = "dirichlet_zero")
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("extents", &Grid::extents)
        .def_property_readonly("origin", &Grid::origins)
        .def_property_readonly("spacing", &Grid::spacings)
        .def_property_readonly("boundary", [](const Grid& g) { return std::string(to_string(g.boundary())); })
        .def("coordinates", [](const Grid& g, int axis) {
            if (axis < 0 || axis >= g.dim()) throw GridError("axis out of range");
            py::array_t<double> out(static_cast<py::ssize_t>(g.extent(axis)));
            for (std::size_t i = 0; i < g.extent(axis); ++i) out.mutable_data()[i] = g.coordinate(axis, i);
            return out;
        }, py::arg("axis"))
        .def("__repr__", &Grid::describe);

    py::class_<SemiclassicalScenario>(m, "Scenario")
        .def_static("from_config", [](const std::string& document, const std::vector<std::string>& overrides) {
            ScenarioConfig cfg(nlohmann::json::parse(document));
            for (const auto& o : overrides) cfg.apply_override(o);
            return cfg.build();
        }, py::arg("document"), py::arg("overrides") = std::vector<std::string>{},
           "Builds a scenario from a configuration JSON string.")
        .def_static("load", [](const std::filesystem::path& dir) { return io::load_scenario(dir); }, py::arg("directory"))
        .def("save", [](const SemiclassicalScenario& s, const std::filesystem::path& dir) { io::save_scenario(dir, s); },
             py::arg("directory"))
        .def_readonly("grid", &SemiclassicalScenario::grid)
        .def_readonly("times", &SemiclassicalScenario::times)
        .def_readonly("energy", &SemiclassicalScenario::energy)
        .def_readonly("eps_node", &SemiclassicalScenario::eps_node)
        .def_readonly("gauge_zeta", &SemiclassicalScenario::gauge_zeta)
        .def_readonly("id", &SemiclassicalScenario::id)
        .def_readonly("config_hash", &SemiclassicalScenario::config_hash)
        .def_property_readonly("hbar", [](const SemiclassicalScenario& s) { return s.constants.hbar; })
        .def_property_readonly("mass", [](const SemiclassicalScenario& s) { return s.constants.mass; })
        .def_property_readonly("case", [](const SemiclassicalScenario& s) { return std::string(to_string(s.kind)); })
        .def_property_readonly("slices", &SemiclassicalScenario::slices)
        .def("lambda_at", &SemiclassicalScenario::lambda_at_slice, py::arg("slice") = 0)
        .def("quantum_constant", &SemiclassicalScenario::quantum_constant, py::arg("slice") = 0)
        .def("amplitude", [](const SemiclassicalScenario& s, std::size_t k) { return to_array(s.amplitude.at(k)); },
             py::arg("slice") = 0)
        .def("phase_numerator", [](const SemiclassicalScenario& s, std::size_t k) { return to_array(s.phase_numerator.at(k)); },
             py::arg("slice") = 0)
        .def("phase", [](const SemiclassicalScenario& s, std::size_t k) { return to_array(s.phase.at(k)); },
             py::arg("slice") = 0)
        .def("potential", [](const SemiclassicalScenario& s, std::size_t k) { return to_array(s.potential.at(k)); },
             py::arg("slice") = 0)
        .def("mask", [](const SemiclassicalScenario& s, std::size_t k) { return to_array(s.mask.at(k), s.grid); },
             py::arg("slice") = 0)
        .def("quantum_potential", [](const SemiclassicalScenario& s, std::size_t k) {
            return to_array(quantum_potential(s.amplitude.at(k), s.constants, s.eps_node).Q);
        }, py::arg("slice") = 0)
        .def("_verify_json", [](const SemiclassicalScenario& s) { return report_json(verify_scenario(s)); })
        .def("_restricted_ansatz_json", [](const SemiclassicalScenario& s) {
            VerificationReport r;
            r.add(check_restricted_ansatz(s));
            return report_json(r);
        })
        .def("gauge_shifted", [](const SemiclassicalScenario& s, double sign) {
            return gauge_shift(s, quantum_potential_gauge(s, s.times, sign));
        }, py::arg("sign") = 1.0, "Shifts V by sign * K(t) and the phase by the matching zeta.");

    m.def("construct_stationary",
          [](const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& R,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& S_tilde, double E, double lambda,
             double hbar, double mass, double eps_node, double helmholtz_tolerance) {
              ScenarioOptions opts;
              opts.eps_node = eps_node;
              opts.tolerances.helmholtz = helmholtz_tolerance;
              return construct_stationary(from_array(g, R), from_array(g, S_tilde), E, lambda,
                                          PhysicalConstants(hbar, mass), opts);
          },
          py::arg("grid"), py::arg("R"), py::arg("S_tilde"), py::arg("E"), py::arg("lam"), py::arg("hbar") = 1.0,
          py::arg("mass") = 1.0, py::arg("eps_node") = 0.0, py::arg("helmholtz_tolerance") = 1e-2);

    m.def("quantum_potential",
          [](const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& R, double hbar,
             double mass, double eps_node) {
              ScalarField r = from_array(g, R);
              if (eps_node <= 0.0) eps_node = default_eps_node(r);
              auto q = quantum_potential(r, PhysicalConstants(hbar, mass), eps_node);
              return py::make_tuple(to_array(q.Q), to_array(q.mask, g));
          },
          py::arg("grid"), py::arg("R"), py::arg("hbar") = 1.0, py::arg("mass") = 1.0, py::arg("eps_node") = 0.0,
          "Returns (Q, mask) with Q zero on masked nodes.");

    m.def("config_hash", [](const std::string& document) { return ScenarioConfig(nlohmann::json::parse(document)).hash(); },
          py::arg("document"));

#ifdef SEMICLASSICAL_HAVE_CLI
    m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "semiclassical");
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs a CLI subcommand; returns (exit_code, stdout, stderr).");
#endif
}
