// Python bindings for the main operations: exact solutions, structure
// matrices, the covariant Hamiltonian and its gradient, the presymplectic
// two-forms, and the JSON-configured drivers behind the msmaxwell tool.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <stdexcept>

#include "msmx/cli.hpp"
#include "msmx/core.hpp"
#include "msmx/errors.hpp"
#include "msmx/exact.hpp"
#include "msmx/hamilton.hpp"
#include "msmx/structure.hpp"

namespace py = pybind11;
using namespace msmx;

namespace {

py::array_t<double> as_array3(const Vec3& v) {
    py::array_t<double> out(3);
    auto w = out.mutable_unchecked<1>();
    for (int i = 0; i < 3; ++i) w(i) = v[i];
    return out;
}

py::array_t<double> as_array18(const State18& z) {
    py::array_t<double> out(18);
    auto w = out.mutable_unchecked<1>();
    for (int i = 0; i < 18; ++i) w(i) = z[static_cast<std::size_t>(i)];
    return out;
}

py::array_t<double> as_matrix(const Mat18& m) {
    py::array_t<double> out({18, 18});
    auto w = out.mutable_unchecked<2>();
    for (int i = 0; i < 18; ++i)
        for (int j = 0; j < 18; ++j)
            w(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return out;
}

State18 to_state18(const py::array_t<double>& a) {
    if (a.ndim() != 1 || a.shape(0) != 18)
        throw std::invalid_argument("state must be a length-18 array in (H,E,V,U,P,Q) order");
    State18 z;
    auto r = a.unchecked<1>();
    for (int i = 0; i < 18; ++i) z[static_cast<std::size_t>(i)] = r(i);
    return z;
}

Vec3 to_vec3(const py::array_t<double>& a) {
    if (a.ndim() != 1 || a.shape(0) != 3) throw std::invalid_argument("expected a length-3 array");
    auto r = a.unchecked<1>();
    return {r(0), r(1), r(2)};
}

py::dict report_dict(const RunReport& rep) {
    py::dict d;
    d["steps"] = rep.steps;
    d["t_end"] = rep.t_end;
    d["wall_seconds"] = rep.wall_seconds;
    d["has_exact"] = rep.has_exact;
    if (rep.has_exact) {
        d["linf"] = rep.linf;
        d["l2"] = rep.l2;
        d["linf_H2"] = rep.linf_H2;
    }
    d["energy_initial"] = rep.energy_initial;
    d["energy_final"] = rep.energy_final;
    return d;
}

}  // namespace

PYBIND11_MODULE(_msmx, m) {
    m.doc() = "structure-preserving box schemes for 1D Maxwell systems";

    py::register_exception<ValidationError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalFailure", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "OutputError", PyExc_OSError);

    m.def(
        "exact_plane_wave",
        [](double x, double t, double eps, double mu) {
            const FieldPoint fp = exact_plane_wave(x, t, eps, mu);
            return py::make_tuple(as_array3(fp.H), as_array3(fp.E));
        },
        py::arg("x"), py::arg("t"), py::arg("eps") = 1.0, py::arg("mu") = 1.0,
        "Travelling plane wave (H, E) for constant media.");

    m.def(
        "exact_extended_state",
        [](double x, double t, double eps, double mu) {
            return as_array18(to_flat(exact_extended_state(x, t, eps, mu)));
        },
        py::arg("x"), py::arg("t"), py::arg("eps") = 1.0, py::arg("mu") = 1.0,
        "Full 18-component exact state (H,E,V,U,P,Q) completing the plane wave.");

    m.def(
        "rot_matrix",
        [](int axis) {
            if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1, or 2");
            const Mat3 r = rot_matrix(static_cast<Axis>(axis));
            py::array_t<double> out({3, 3});
            auto w = out.mutable_unchecked<2>();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) w(i, j) = r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            return out;
        },
        py::arg("axis"), "Curl generator R_axis as a 3x3 matrix.");

    m.def(
        "structure_matrices",
        []() {
            const MsStructure s = assemble_ms_structure();
            py::dict d;
            d["M"] = as_matrix(s.M);
            d["K1"] = as_matrix(s.K1);
            d["K2"] = as_matrix(s.K2);
            d["K3"] = as_matrix(s.K3);
            return d;
        },
        "Antisymmetric structure matrices of the Hamilton form M Z_t + K (curl Z) = grad S.");

    m.def(
        "covariant_hamiltonian",
        [](const py::array_t<double>& z, double eps, double mu, const py::array_t<double>& J,
           const py::array_t<double>& K) {
            return covariant_hamiltonian(from_flat(to_state18(z)), eps, mu, to_vec3(J), to_vec3(K));
        },
        py::arg("z"), py::arg("eps"), py::arg("mu"),
        py::arg("J") = py::array_t<double>(std::vector<py::ssize_t>{3}),
        py::arg("K") = py::array_t<double>(std::vector<py::ssize_t>{3}),
        "Covariant Hamiltonian S(Z) at an 18-component state.");

    m.def(
        "grad_S",
        [](const py::array_t<double>& z, double eps, double mu, const py::array_t<double>& J,
           const py::array_t<double>& K) {
            return as_array18(grad_S(from_flat(to_state18(z)), eps, mu, to_vec3(J), to_vec3(K)));
        },
        py::arg("z"), py::arg("eps"), py::arg("mu"),
        py::arg("J") = py::array_t<double>(std::vector<py::ssize_t>{3}),
        py::arg("K") = py::array_t<double>(std::vector<py::ssize_t>{3}),
        "Gradient of the covariant Hamiltonian in (H,E,V,U,P,Q) order.");

    m.def(
        "two_forms",
        [](const py::array_t<double>& xi, const py::array_t<double>& eta) {
            const MsStructure s = assemble_ms_structure();
            const TwoFormValue v = two_forms(to_state18(xi), to_state18(eta), s);
            return py::make_tuple(v.omega, v.kappa);
        },
        py::arg("xi"), py::arg("eta"),
        "Presymplectic forms (omega, kappa) on a pair of tangent states.");

    m.def(
        "run_simulation",
        [](const std::string& config_json, const std::string& out_dir) {
            return report_dict(run_simulation(parse_config(config_json), out_dir));
        },
        py::arg("config_json"), py::arg("out_dir") = std::string(),
        "Run a JSON-configured experiment; empty out_dir suppresses file output.");

    m.def(
        "convergence_study",
        [](const std::string& config_json, int levels) {
            py::list out;
            for (const ConvergenceRow& r : convergence_study(parse_config(config_json), levels)) {
                py::dict d;
                d["nx"] = r.nx;
                d["dx"] = r.dx;
                d["dt"] = r.dt;
                d["linf"] = r.linf;
                d["l2"] = r.l2;
                d["order_linf"] = r.order_linf;
                d["order_l2"] = r.order_l2;
                out.append(d);
            }
            return out;
        },
        py::arg("config_json"), py::arg("levels") = 3,
        "Halve dx and dt together; returns per-level errors and observed orders.");

    m.def(
        "msc_check",
        [](const std::string& config_json, std::uint64_t seed_a, std::uint64_t seed_b) {
            const ResidualReport rep = msc_check(parse_config(config_json), seed_a, seed_b);
            py::dict d;
            d["nx"] = rep.nx;
            d["nt"] = rep.nt;
            d["max_abs"] = rep.max_abs;
            d["scale"] = rep.scale;
            d["relative"] = rep.relative();
            return d;
        },
        py::arg("config_json"), py::arg("seed_a"), py::arg("seed_b"),
        "Discrete conservation-law residual on a random tangent pair.");

    m.def(
        "adjoint_check",
        [](const std::string& op, const std::string& medium, int n) {
            py::list out;
            for (const AdjointCheckRow& r : adjoint_check(op, medium, n)) {
                py::dict d;
                d["op"] = r.op;
                d["medium"] = r.medium;
                d["n"] = r.n;
                d["h"] = r.h;
                d["defect"] = r.defect;
                d["scale"] = r.scale;
                d["defect_over_h2"] = r.defect_over_h2;
                out.append(d);
            }
            return out;
        },
        py::arg("op"), py::arg("medium") = std::string(), py::arg("n") = 8,
        "Symmetry defect of a space-time operator at two refinement levels.");
}
