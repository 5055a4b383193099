#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chblab/config.hpp"
#include "chblab/evolution.hpp"
#include "chblab/flow.hpp"
#include "chblab/io.hpp"
#include "chblab/nutrient.hpp"
#include "chblab/potentials.hpp"
#include "chblab/sources.hpp"
#include "chblab/stationary.hpp"

namespace py = pybind11;
using namespace chb;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Cell fields cross the boundary as (ny, nx) arrays.
Array to_array(const ScalarField& s) {
    Array a({s.grid.ny, s.grid.nx});
    std::copy(s.values.data(), s.values.data() + s.values.size(), a.mutable_data());
    return a;
}

ScalarField from_array(const Grid2D& g, const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != g.ny || a.shape(1) != g.nx)
        throw std::invalid_argument("expected an array of shape (ny, nx)");
    ScalarField s(g);
    std::copy(a.data(), a.data() + a.size(), s.values.data());
    return s;
}

template <class F>
Array map(const Array& r, F f) {
    Array out(r.request().shape);
    const double* in = r.data();
    double* o = out.mutable_data();
    for (py::ssize_t k = 0; k < r.size(); ++k) o[k] = f(in[k]);
    return out;
}

py::dict ledger_dict(const EnergyLedger& ledger) {
    py::dict d;
    const auto cols = EnergyLedger::columns();
    std::vector<std::vector<double>> data(cols.size());
    for (const auto& r : ledger.rows) {
        const double v[] = {double(r.step),       r.t,          r.dt,          r.energy,          r.dissipation,
                            r.chemotaxis,         r.source_work, r.lifting_work, r.energy_defect, r.mass_lhs,
                            r.mass_rhs,           r.mass_defect, r.overshoot,    r.overshoot_integral,
                            r.phi_mean,           r.phi_max_abs, r.sigma_min,    r.sigma_max,
                            double(r.newton_iterations), r.energy_slack};
        for (size_t c = 0; c < cols.size() && c < std::size(v); ++c) data[c].push_back(v[c]);
    }
    for (size_t c = 0; c < cols.size(); ++c) d[py::str(cols[c])] = py::array(py::cast(data[c]));
    return d;
}

RunConfig load(const std::string& path, const std::vector<std::string>& overrides, const std::string& command) {
    return parse_config(path, overrides, command);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Regularized Cahn-Hilliard-Brinkman tumour model: potentials, elliptic solves and time stepping.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::enum_<PotentialKind>(m, "PotentialKind")
        .value("obstacle", PotentialKind::DoubleObstacle)
        .value("log", PotentialKind::Logarithmic);

    py::class_<PotentialSpec>(m, "PotentialSpec")
        .def_static("obstacle", &PotentialSpec::obstacle, py::arg("delta"))
        .def_static("logarithmic", &PotentialSpec::logarithmic, py::arg("theta"), py::arg("theta_c"), py::arg("delta"))
        .def_readonly("kind", &PotentialSpec::kind)
        .def_readonly("delta", &PotentialSpec::delta)
        .def_readonly("theta", &PotentialSpec::theta)
        .def_readonly("theta_c", &PotentialSpec::theta_c)
        .def("__repr__", [](const PotentialSpec& s) {
            return "PotentialSpec(" + to_string(s.kind) + ", delta=" + std::to_string(s.delta) + ")";
        });

    m.def("beta_hat", [](const PotentialSpec& s, const Array& r) { return map(r, [&](double x) { return beta_hat(s, x); }); });
    m.def("beta", [](const PotentialSpec& s, const Array& r) { return map(r, [&](double x) { return beta(s, x); }); });
    m.def("beta_prime", [](const PotentialSpec& s, const Array& r) { return map(r, [&](double x) { return beta_prime(s, x); }); });
    m.def("psi", [](const PotentialSpec& s, const Array& r) { return map(r, [&](double x) { return psi(s, x); }); });
    m.def("cutoff", [](double delta, const Array& r) { return map(r, [&](double x) { return cutoff(delta, x); }); });

    py::class_<SourceModel>(m, "SourceModel")
        .def_static("none", &SourceModel::none)
        .def_static("example", &build_example_model, py::arg("P"), py::arg("A"), py::arg("alpha"), py::arg("rho_S"),
                    py::arg("kind"), py::arg("r0") = 1.5)
        .def("gamma_v", [](const SourceModel& sm, double r, double s) { return gamma_v(sm, r, s); })
        .def("gamma_phi", [](const SourceModel& sm, double r, double s) { return gamma_phi(sm, r, s); })
        .def("gamma", [](const SourceModel& sm, double r, double s) { return gamma_stationary(sm, r, s); })
        .def("delta0", [](const SourceModel& sm) { return source_delta0(sm); });

    py::class_<Grid2D>(m, "Grid")
        .def(py::init(&Grid2D::make), py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0, py::arg("ly") = 1.0)
        .def_readonly("nx", &Grid2D::nx)
        .def_readonly("ny", &Grid2D::ny)
        .def_readonly("lx", &Grid2D::lx)
        .def_readonly("ly", &Grid2D::ly)
        .def_property_readonly("hx", &Grid2D::hx)
        .def_property_readonly("hy", &Grid2D::hy);

    m.def(
        "solve_nutrient",
        [](const Grid2D& g, const Array& phi, double K, double h0) {
            NutrientProblem p;
            p.phi = from_array(g, phi);
            p.K = K;
            p.h = default_consumption(h0);
            return to_array(solve_nutrient(p));
        },
        py::arg("grid"), py::arg("phi"), py::arg("K") = 1.0, py::arg("h0") = 1.0,
        "Quasistatic nutrient with Robin influx; returns sigma as an (ny, nx) array.");

    m.def(
        "divergence_lift",
        [](const Grid2D& g, const Array& f) {
            const LiftResult r = divergence_lift(from_array(g, f));
            const ScalarField d = div(r.u);
            return py::make_tuple(to_array(d), r.boundary_flux, r.h1_constant);
        },
        py::arg("grid"), py::arg("f"), "Returns (div D(f), boundary flux density, H1 constant).");

    m.def(
        "simulate",
        [](const std::string& config, const std::vector<std::string>& overrides) {
            const RunConfig cfg = load(config, overrides, "simulate");
            Simulation sim(cfg.grid, cfg.spec, cfg.source_model(), cfg.model_params());
            RunSettings rs;
            rs.t_end = cfg.t_end;
            rs.dt = cfg.dt;
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = run(sim, sim.initial_state(cfg.initial_field()), rs);
            }
            py::dict out;
            out["phi"] = to_array(tr.final_state.phi);
            out["mu"] = to_array(tr.final_state.mu);
            out["sigma"] = to_array(tr.final_state.sigma);
            out["p"] = to_array(tr.final_state.p);
            out["t"] = tr.final_state.t;
            out["ledger"] = ledger_dict(tr.ledger);
            out["holder_constant"] = tr.holder_constant;
            return out;
        },
        py::arg("config") = std::string(), py::arg("overrides") = std::vector<std::string>{},
        "Runs the time-dependent model from a TOML file (may be empty) plus key=value overrides.");

    m.def(
        "stationary",
        [](const std::string& config, const std::vector<std::string>& overrides) {
            const RunConfig cfg = load(config, overrides, "stationary");
            StationaryConfig sc;
            sc.grid = cfg.grid;
            sc.spec = cfg.spec;
            sc.model = cfg.source_model();
            sc.params = cfg.model_params();
            sc.C_F = cfg.stationary_CF;
            sc.omega = cfg.stationary_omega;
            sc.outer_tol = cfg.stationary_tol;
            sc.max_outer = cfg.stationary_max_outer;
            sc.strategy = cfg.stationary_strategy;
            sc.pseudotime_horizon = cfg.pseudotime_horizon;
            sc.initial = cfg.initial_field();
            StationaryResult r;
            {
                py::gil_scoped_release release;
                r = solve_stationary(sc);
            }
            py::dict out;
            out["phi"] = to_array(r.state.phi);
            out["mu"] = to_array(r.state.mu);
            out["sigma"] = to_array(r.state.sigma);
            out["converged"] = r.converged;
            out["iterations"] = r.outer_iterations;
            out["residual"] = r.residual.max();
            out["history"] = r.history;
            return out;
        },
        py::arg("config") = std::string(), py::arg("overrides") = std::vector<std::string>{});

    m.def("version", &library_version);
}
