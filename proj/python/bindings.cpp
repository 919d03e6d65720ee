#include "caps/error.hpp"
#include "caps/protocols.hpp"
#include "caps/sweep.hpp"
#include "caps/validate.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace caps;

namespace {

py::array_t<cplx> to_numpy(std::span<const cplx> v) {
    py::array_t<cplx> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> times(const TimeGrid& g) {
    py::array_t<double> out(static_cast<py::ssize_t>(g.n_points));
    auto* p = out.mutable_data();
    for (std::size_t i = 0; i < g.n_points; ++i) p[i] = g.time(i);
    return out;
}

// Matrices coming from Python are copied element by element rather than
// through the Eigen type caster.
using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

template <int N>
Eigen::Matrix<cplx, N, N> to_matrix(const ComplexArray& a) {
    if (a.ndim() != 2 || a.shape(0) != N || a.shape(1) != N) {
        throw Error(ErrorCode::InvalidArgument, "expected a " + std::to_string(N) + "x" + std::to_string(N) + " matrix");
    }
    const auto r = a.unchecked<2>();
    Eigen::Matrix<cplx, N, N> m;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) m(i, j) = r(i, j);
    }
    return m;
}

AtomWeights weights_from(const std::optional<std::array<cplx, 4>>& w) {
    return w ? AtomWeights::normalized(*w) : AtomWeights::balanced();
}

} // namespace

PYBIND11_MODULE(_caps, m) {
    m.doc() = "Heralded entanglement via single-photon scattering off single-sided cavities";
    m.attr("__version__") = CAPS_VERSION;

    static PyObject* caps_error = PyErr_NewException("caps._caps.CapsError", PyExc_RuntimeError, nullptr);
    m.add_object("CapsError", py::handle(caps_error));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // Attach the code name so callers can branch on it.
            py::object instance = py::reinterpret_borrow<py::object>(caps_error)(e.what());
            instance.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(caps_error, instance.ptr());
        }
    });

    py::class_<CavityParams>(m, "CavityParams")
        .def(py::init<>())
        .def_readwrite("g", &CavityParams::g)
        .def_readwrite("kappa", &CavityParams::kappa)
        .def_readwrite("gamma31", &CavityParams::gamma31)
        .def_readwrite("gamma32", &CavityParams::gamma32)
        .def_readwrite("detector_efficiency", &CavityParams::detector_efficiency)
        .def_property_readonly("gamma3", &CavityParams::gamma3)
        .def_property_readonly("cooperativity", &CavityParams::cooperativity)
        .def_static("from_cooperativity", &CavityParams::from_cooperativity, py::arg("C"), py::arg("gamma3") = 1.0)
        .def_static("from_coupling", &CavityParams::from_coupling, py::arg("g"), py::arg("gamma3") = 1.0)
        .def("validate", &CavityParams::validate)
        .def("__repr__", [](const CavityParams& p) {
            return "CavityParams(g=" + format_number(p.g) + ", kappa=" + format_number(p.kappa) +
                   ", gamma31=" + format_number(p.gamma31) + ", gamma32=" + format_number(p.gamma32) + ")";
        });

    py::class_<PulseEnvelope>(m, "PulseEnvelope")
        .def_property_readonly("t", [](const PulseEnvelope& p) { return times(p.grid()); })
        .def_property_readonly("amp", [](const PulseEnvelope& p) { return to_numpy(p.amp()); })
        .def_property_readonly("dt", [](const PulseEnvelope& p) { return p.grid().dt; })
        .def_property_readonly("tau_p", &PulseEnvelope::tau_p)
        .def("norm", [](const PulseEnvelope& p) { return envelope_norm(p); })
        .def("__len__", &PulseEnvelope::size);

    m.def(
        "gaussian_pulse",
        [](double tau_p, const CavityParams& params, double t0, std::optional<double> dt, std::optional<double> span) {
            return gaussian_pulse(tau_p, t0, simulation_grid(tau_p, t0, params, dt, span));
        },
        py::arg("tau_p"), py::arg("params"), py::arg("t0") = 0.0, py::arg("dt") = py::none(),
        py::arg("span") = py::none(),
        "Unit-normalized Gaussian input on the default grid for these cavity parameters.");

    m.def("overlap", &overlap);

    m.def(
        "evolve_sector",
        [](int M, const CavityParams& params, const PulseEnvelope& pulse) {
            const auto traj = evolve_sector(M, params, pulse);
            py::dict out;
            out["t"] = times(pulse.grid());
            out["c_cav"] = to_numpy(traj.c_cav);
            out["c_exc"] = to_numpy(traj.c_exc);
            out["alpha_out"] = traj.alpha_out;
            return out;
        },
        py::arg("M"), py::arg("params"), py::arg("pulse"));

    m.def("semianalytic_output", &semianalytic_output, py::arg("M"), py::arg("params"), py::arg("pulse"));
    m.def("frequency_reflection", &frequency_reflection, py::arg("M"), py::arg("params"), py::arg("omega") = 0.0);

    m.def("concurrence", [](const ComplexArray& rho) { return concurrence(TwoQubitState(to_matrix<4>(rho))); },
          py::arg("rho"));
    m.def("schmidt_entropy", [](const ComplexArray& a) { return schmidt_entropy_2d(to_matrix<2>(a)); },
          py::arg("amplitudes"));

    py::class_<HeraldBranch>(m, "HeraldBranch")
        .def_readonly("herald", &HeraldBranch::herald)
        .def_readonly("probability", &HeraldBranch::probability)
        .def_readonly("concurrence", &HeraldBranch::concurrence)
        .def_readonly("purity", &HeraldBranch::purity)
        .def_property_readonly("rho", [](const HeraldBranch& b) -> std::optional<Matrix4c> {
            if (!b.state) return std::nullopt;
            return b.state->rho();
        });

    py::class_<ProtocolOutcome>(m, "ProtocolOutcome")
        .def_property_readonly("protocol", [](const ProtocolOutcome& o) { return std::string(to_string(o.protocol)); })
        .def_readonly("branches", &ProtocolOutcome::branches)
        .def_readonly("total_probability", &ProtocolOutcome::total_probability)
        .def_readonly("input", &ProtocolOutcome::input)
        .def_property_readonly("responses",
                               [](const ProtocolOutcome& o) {
                                   py::dict d;
                                   for (const auto& [name, env] : o.responses) d[py::str(name)] = env;
                                   return d;
                               })
        .def("branch", &ProtocolOutcome::branch, py::arg("herald"), py::return_value_policy::reference_internal);

    m.def(
        "run_same_cavity",
        [](const CavityParams& params, const PulseEnvelope& pulse, std::optional<std::array<cplx, 4>> weights) {
            return run_same_cavity(params, pulse, weights_from(weights));
        },
        py::arg("params"), py::arg("pulse"), py::arg("weights") = py::none(),
        "weights: four amplitudes in the order |11>, |12>, |21>, |22> (balanced if omitted).");

    m.def(
        "run_remote",
        [](const CavityParams& params, const PulseEnvelope& pulse, std::optional<std::array<cplx, 4>> weights,
           std::optional<CavityParams> params_b) {
            const auto w = weights_from(weights);
            return params_b ? run_remote(params, *params_b, pulse, w) : run_remote(params, pulse, w);
        },
        py::arg("params"), py::arg("pulse"), py::arg("weights") = py::none(), py::arg("params_b") = py::none());

    py::class_<CloudBranch>(m, "CloudBranch")
        .def_readonly("herald", &CloudBranch::herald)
        .def_readonly("probability", &CloudBranch::probability)
        .def_readonly("amplitudes", &CloudBranch::amplitudes)
        .def_readonly("schmidt_entropy", &CloudBranch::schmidt_entropy)
        .def_readonly("concurrence", &CloudBranch::concurrence)
        .def_readonly("purity", &CloudBranch::purity);

    py::class_<CloudOutcome>(m, "CloudOutcome")
        .def_readonly("branches", &CloudOutcome::branches)
        .def_readonly("total_probability", &CloudOutcome::total_probability)
        .def("branch", &CloudOutcome::branch, py::arg("herald"), py::return_value_policy::reference_internal);

    m.def(
        "run_ghz_cloud",
        [](const CavityParams& params, const PulseEnvelope& pulse, int n_a, int n_b, double phi_a, double phi_b,
           const std::string& mode) {
            return run_ghz_cloud(CloudSpec{n_a, n_b, phi_a, phi_b, parse_cloud_mode(mode)}, params, pulse);
        },
        py::arg("params"), py::arg("pulse"), py::arg("n_a") = 1, py::arg("n_b") = 1, py::arg("phi_a") = 0.0,
        py::arg("phi_b") = 0.0, py::arg("mode") = "ideal");

    m.def(
        "run_sweep",
        [](const std::string& protocol, const std::string& axis, std::vector<double> grid, double tau_p,
           std::vector<double> cooperativities, double gamma3, double detector_efficiency, unsigned threads) {
            SweepSpec spec;
            spec.protocol = parse_protocol(protocol);
            spec.axis = parse_sweep_axis(axis);
            spec.grid = std::move(grid);
            spec.tau_p = tau_p;
            spec.cooperativities = std::move(cooperativities);
            spec.gamma3 = gamma3;
            spec.detector_efficiency = detector_efficiency;
            spec.threads = threads;
            SweepTable table;
            {
                py::gil_scoped_release release;
                table = run_sweep(spec);
            }
            py::array_t<double> rows({table.rows.size(), table.columns.size()});
            auto r = rows.mutable_unchecked<2>();
            for (std::size_t i = 0; i < table.rows.size(); ++i) {
                for (std::size_t j = 0; j < table.columns.size(); ++j) r(i, j) = table.rows[i][j];
            }
            return py::make_tuple(table.columns, rows);
        },
        py::arg("protocol") = "same-cavity", py::arg("axis") = "C", py::arg("grid"), py::arg("tau_p") = 50.0,
        py::arg("cooperativities") = std::vector<double>{0.5, 1.0, 3.0, 10.0}, py::arg("gamma3") = 1.0,
        py::arg("detector_efficiency") = 1.0, py::arg("threads") = 0u,
        "Returns (columns, rows) with rows as a 2-D float array.");

    m.def("log_grid", &log_grid);
    m.def("linear_grid", &linear_grid);

    m.def("run_validation", [] {
        py::list out;
        for (const auto& c : run_validation()) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    });
}
