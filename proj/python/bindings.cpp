#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "flownet/errors.hpp"
#include "flownet/invariants.hpp"
#include "flownet/oracle.hpp"
#include "flownet/reflection.hpp"
#include "flownet/scenario_io.hpp"
#include "flownet/solver.hpp"

namespace py = pybind11;
using namespace flownet;

namespace {

Trajectory on_scenario_grid(const Scenario& s, const Matrix& values) {
    const TimeGrid g = s.grid();
    if (static_cast<std::size_t>(values.rows()) != g.samples() ||
        static_cast<std::size_t>(values.cols()) != s.link_count()) {
        throw StructuralError("array must have shape (samples, links) = (" + std::to_string(g.samples()) + ", " +
                              std::to_string(s.link_count()) + ")");
    }
    return Trajectory{g, values};
}

Vector time_axis(const TimeGrid& g) {
    Vector t(static_cast<Eigen::Index>(g.samples()));
    for (std::size_t k = 0; k < g.samples(); ++k) t(static_cast<Eigen::Index>(k)) = g.time(k);
    return t;
}

py::list checks_to_list(const InvariantReport& r) {
    py::list out;
    for (const auto& c : r.checks) {
        py::dict d;
        d["name"] = c.name;
        d["passed"] = c.passed;
        d["worst"] = c.worst;
        d["threshold"] = c.threshold;
        d["detail"] = c.detail;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_flownet, m) {
    m.doc() = "Flow network simulator core";

    // Bad input maps onto ValueError, failed certificates and iterations onto RuntimeError.
    py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<CertificateError>(m, "CertificateError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("step", &Scenario::step)
        .def_property_readonly("links", [](const Scenario& s) { return s.routing.graph.links(); })
        .def_property_readonly("nodes", [](const Scenario& s) { return s.routing.graph.nodes(); })
        .def_property_readonly("routing", [](const Scenario& s) { return s.routing.R; })
        .def_property_readonly("x0", [](const Scenario& s) { return s.x0; })
        .def_property_readonly("lipschitz", [](const Scenario& s) { return s.controller->lipschitz(); })
        .def("link_count", &Scenario::link_count)
        .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(2); })
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario '" + s.name + "' links=" + std::to_string(s.link_count()) + ">";
        });

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("t", [](const Solution& s) { return time_axis(s.grid); })
        .def_property_readonly("x", [](const Solution& s) { return s.x.values; })
        .def_property_readonly("y", [](const Solution& s) { return s.y.values; })
        .def_property_readonly("w", [](const Solution& s) { return s.w.values; })
        .def_property_readonly("z", [](const Solution& s) { return s.z.values; })
        .def_property_readonly("zeta", [](const Solution& s) { return s.zeta.values; })
        .def_property_readonly("window_steps", [](const Solution& s) { return s.report.window_steps; })
        .def_property_readonly("window_length", [](const Solution& s) { return s.report.sizing.length; })
        .def_property_readonly("rho", [](const Solution& s) { return s.report.sizing.rho; })
        .def_property_readonly("max_residual", [](const Solution& s) { return s.report.max_residual; });

    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));
    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<string>");

    m.def(
        "solve",
        [](const Scenario& s, std::optional<double> tol_picard, std::optional<double> tol_psi,
           std::optional<Matrix> initial_guess) {
            SolveOptions o;
            o.tol_picard = tol_picard.value_or(s.tolerances.picard);
            o.tol_psi = tol_psi.value_or(s.tolerances.psi);
            if (initial_guess) o.initial_guess = on_scenario_grid(s, *initial_guess);
            py::gil_scoped_release release;
            return solve(s, o);
        },
        py::arg("scenario"), py::arg("tol_picard") = py::none(), py::arg("tol_psi") = py::none(),
        py::arg("initial_guess") = py::none());

    m.def("solve_report_json", [](const Scenario& s, const Solution& sol) { return solve_report_json(s, sol).dump(); });

    m.def(
        "equilibrium_outflow",
        [](const Scenario& s, std::optional<Vector> lambda) {
            return equilibrium_outflow(s.routing, lambda ? *lambda : Vector(s.inflow.values().row(0).transpose()));
        },
        py::arg("scenario"), py::arg("inflow") = py::none());

    m.def(
        "build_weighted_norm",
        [](const Scenario& s) {
            const auto n = build_weighted_norm(s.routing);
            return py::make_tuple(n.weights, n.contraction_factor);
        },
        py::arg("scenario"));

    m.def(
        "oracle_solve",
        [](const Scenario& s, int refine) {
            OracleConfig cfg;
            cfg.refine = refine;
            OracleResult r;
            {
                py::gil_scoped_release release;
                r = oracle_solve(s, cfg);
            }
            py::dict d;
            d["t"] = time_axis(r.x.grid);
            d["x"] = r.x.values;
            d["z"] = r.z.values;
            d["zeta"] = r.zeta.values;
            d["w"] = r.w.values;
            d["x_coarse"] = subsample(r.x, refine).values;
            d["projection_loss"] = r.projection_loss;
            return d;
        },
        py::arg("scenario"), py::arg("refine") = 10);

    m.def(
        "check_solution",
        [](const Scenario& s, const Solution& sol, double eps) { return checks_to_list(check_solution(s, sol, eps)); },
        py::arg("scenario"), py::arg("solution"), py::arg("eps"));

    m.def(
        "apply_pi",
        [](const Scenario& s, const Matrix& gamma, const Matrix& v) {
            return apply_pi(on_scenario_grid(s, gamma), on_scenario_grid(s, v), s.routing).values;
        },
        py::arg("scenario"), py::arg("gamma"), py::arg("v"),
        "Pi_gamma(v) on the scenario grid; arrays have shape (samples, links).");

    m.def(
        "fixed_point_psi",
        [](const Scenario& s, const Matrix& gamma, double tol) {
            const auto r = fixed_point_psi(on_scenario_grid(s, gamma), s.routing, build_weighted_norm(s.routing), tol);
            return py::make_tuple(r.w.values, r.iterations);
        },
        py::arg("scenario"), py::arg("gamma"), py::arg("tol") = kDefaultPsiTolerance,
        "Minimal regulator w = Psi(gamma) and the number of Picard passes.");

    m.def(
        "closed_form_single_cell",
        [](double cap, double lambda, double x0, double t) {
            const auto st = closed_form_single_cell(cap, lambda, x0, t);
            return py::make_tuple(st.x, st.z);
        },
        py::arg("cap"), py::arg("inflow"), py::arg("x0"), py::arg("t"));
}
