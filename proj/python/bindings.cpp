// Python bindings for the core operations: lattices and grid functions,
// the difference calculus, scheme assembly and health checks, Wiener
// paths, the pathwise solvers, extrapolation, order fitting, and the
// config-driven study harness.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include "sfdlab/config.hpp"
#include "sfdlab/errors.hpp"
#include "sfdlab/field.hpp"
#include "sfdlab/grid_ops.hpp"
#include "sfdlab/harness.hpp"
#include "sfdlab/integrator.hpp"
#include "sfdlab/lattice.hpp"
#include "sfdlab/report.hpp"
#include "sfdlab/richardson.hpp"
#include "sfdlab/scheme.hpp"
#include "sfdlab/stats.hpp"
#include "sfdlab/wiener.hpp"

namespace py = pybind11;
using namespace sfdlab;

namespace {

GridFunction grid_function_from_array(const Lattice& lat,
                                      const py::array_t<double, py::array::c_style>& a) {
    if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != lat.size())
        throw ValidationError("grid function expects a flat array with one value per node");
    std::vector<double> vals(a.data(), a.data() + a.shape(0));
    return GridFunction(lat, std::move(vals));
}

py::array_t<double> grid_function_to_array(const GridFunction& f) {
    py::array_t<double> out(static_cast<py::ssize_t>(f.size()));
    double* dst = out.mutable_data();
    for (std::size_t i = 0; i < f.size(); ++i) dst[i] = f[i];
    return out;
}

CoefficientField field_from(const py::object& src, int dim) {
    if (py::isinstance<py::str>(src)) return parse_field(src.cast<std::string>(), dim);
    return CoefficientField::constant(src.cast<double>());
}

std::vector<ModeState> modes_from(const std::vector<std::pair<int, std::complex<double>>>& raw) {
    std::vector<ModeState> modes;
    modes.reserve(raw.size());
    for (const auto& [k, amp] : raw) modes.push_back({k, amp});
    return modes;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spatial difference schemes for stochastic parabolic problems";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<SolverAbort>(m, "SolverAbort");

    py::class_<DirectionVector>(m, "DirectionVector")
        .def(py::init<std::vector<int>>(), py::arg("components"))
        .def_static("zero", &DirectionVector::zero, py::arg("dim"))
        .def_static("axis", &DirectionVector::axis, py::arg("dim"), py::arg("axis"))
        .def_property_readonly("dim", &DirectionVector::dim)
        .def_property_readonly("components",
                               [](const DirectionVector& d) {
                                   return std::vector<int>(d.components().begin(),
                                                           d.components().end());
                               })
        .def("is_zero", &DirectionVector::is_zero)
        .def("__neg__", [](const DirectionVector& d) { return -d; })
        .def("__eq__", [](const DirectionVector& a, const DirectionVector& b) { return a == b; })
        .def("__repr__", &DirectionVector::str);

    py::class_<Lattice>(m, "Lattice")
        .def(py::init<int, int, double>(), py::arg("dim"), py::arg("points_per_axis"),
             py::arg("spacing"))
        .def_property_readonly("dim", &Lattice::dim)
        .def_property_readonly("points_per_axis", &Lattice::points_per_axis)
        .def_property_readonly("spacing", &Lattice::spacing)
        .def_property_readonly("period", &Lattice::period)
        .def_property_readonly("size", &Lattice::size)
        .def("coordinates",
             [](const Lattice& l, std::size_t flat) {
                 return l.coordinates(flat);
             },
             py::arg("flat_index"))
        .def("refines_to", &Lattice::refines_to, py::arg("other"), py::arg("levels"))
        .def("__eq__", [](const Lattice& a, const Lattice& b) { return a == b; })
        .def("__repr__", [](const Lattice& l) {
            std::ostringstream os;
            os << "Lattice(dim=" << l.dim() << ", points_per_axis=" << l.points_per_axis()
               << ", spacing=" << l.spacing() << ")";
            return os.str();
        });

    py::class_<GridFunction>(m, "GridFunction")
        .def(py::init(&grid_function_from_array), py::arg("lattice"), py::arg("values"))
        .def(py::init([](const Lattice& lat, double fill) { return GridFunction(lat, fill); }),
             py::arg("lattice"), py::arg("fill") = 0.0)
        .def_static("sample",
                    [](const Lattice& lat, const std::function<double(std::vector<double>)>& f) {
                        return GridFunction::sample(lat, [&](std::span<const double> x) {
                            return f(std::vector<double>(x.begin(), x.end()));
                        });
                    },
                    py::arg("lattice"), py::arg("fn"))
        .def_property_readonly("lattice", &GridFunction::lattice)
        .def_property_readonly("size", &GridFunction::size)
        .def("to_numpy", &grid_function_to_array)
        .def("all_finite", &GridFunction::all_finite)
        .def("__len__", &GridFunction::size)
        .def("__getitem__",
             [](const GridFunction& f, std::size_t i) {
                 if (i >= f.size()) throw py::index_error();
                 return f[i];
             })
        .def("__add__", [](const GridFunction& a, const GridFunction& b) { return a + b; })
        .def("__sub__", [](const GridFunction& a, const GridFunction& b) { return a - b; })
        .def("__rmul__", [](const GridFunction& a, double s) { return s * a; });

    // difference calculus
    m.def("shift", &shift, py::arg("f"), py::arg("direction"), py::arg("steps") = 1);
    m.def("forward_diff", &forward_diff, py::arg("f"), py::arg("direction"));
    m.def("backward_diff", &backward_diff, py::arg("f"), py::arg("direction"));
    m.def("symmetric_diff", &symmetric_diff, py::arg("f"), py::arg("direction"));
    m.def("second_diff", &second_diff, py::arg("f"), py::arg("direction"));
    m.def("mean_op", &mean_op, py::arg("f"), py::arg("direction"));
    m.def("odd_part", &odd_part, py::arg("f"), py::arg("direction"));
    m.def("sup_norm", &sup_norm, py::arg("f"));
    m.def("l2h_norm", &l2h_norm, py::arg("f"));
    m.def("inner", &inner, py::arg("f"), py::arg("g"));
    m.def("restrict_to", &restrict_to, py::arg("fine"), py::arg("coarse"));

    // target problem and scheme assembly
    py::class_<TargetPDE>(m, "TargetPDE")
        .def(py::init<int, int>(), py::arg("dim"), py::arg("driver_count"))
        .def_property_readonly("dim", &TargetPDE::dim)
        .def_property_readonly("driver_count", &TargetPDE::driver_count)
        .def("set_a",
             [](TargetPDE& p, int alpha, int beta, const py::object& f) {
                 p.set_a(alpha, beta, field_from(f, p.dim()));
             },
             py::arg("alpha"), py::arg("beta"), py::arg("field"))
        .def("set_b",
             [](TargetPDE& p, int alpha, int r, const py::object& f) {
                 p.set_b(alpha, r, field_from(f, p.dim()));
             },
             py::arg("alpha"), py::arg("r"), py::arg("field"));

    py::class_<StencilSpec>(m, "StencilSpec")
        .def_property_readonly("dim", &StencilSpec::dim)
        .def_property_readonly("driver_count", &StencilSpec::driver_count)
        .def_property_readonly("nonzero_directions",
                               [](const StencilSpec& s) {
                                   return std::vector<DirectionVector>(
                                       s.nonzero_directions().begin(),
                                       s.nonzero_directions().end());
                               });

    m.def("from_pde_central", &from_pde_central, py::arg("pde"));
    m.def(
        "from_pde_upwind",
        [](const TargetPDE& pde, const std::vector<double>& theta) {
            return from_pde_upwind(pde, theta);
        },
        py::arg("pde"), py::arg("theta"));
    m.def(
        "consistency_residual",
        [](const StencilSpec& spec, const TargetPDE& pde, double t,
           const std::vector<std::vector<double>>& samples) {
            return consistency_residual(spec, pde, t, samples);
        },
        py::arg("spec"), py::arg("pde"), py::arg("t"), py::arg("samples"));

    py::class_<ParabolicityReport>(m, "ParabolicityReport")
        .def_readonly("min_eigenvalue", &ParabolicityReport::min_eigenvalue)
        .def_readonly("min_pq", &ParabolicityReport::min_pq)
        .def_readonly("pass_", &ParabolicityReport::pass);
    m.def(
        "parabolicity_report",
        [](const StencilSpec& spec, double t, const std::vector<std::vector<double>>& samples,
           double tol) { return parabolicity_report(spec, t, samples, tol); },
        py::arg("spec"), py::arg("t"), py::arg("samples"), py::arg("tol") = 1e-12);

    m.def("apply_L", &apply_L, py::arg("spec"), py::arg("t"), py::arg("f"));
    m.def("apply_M", &apply_M, py::arg("spec"), py::arg("t"), py::arg("f"));

    // Wiener paths
    py::class_<WienerPath>(m, "WienerPath")
        .def_static("sample", &WienerPath::sample, py::arg("driver_count"),
                    py::arg("step_count"), py::arg("horizon"), py::arg("seed"))
        .def_static(
            "conditioned_linear",
            [](int m_, int steps, double horizon, const std::vector<double>& terminal) {
                return WienerPath::conditioned_linear(m_, steps, horizon, terminal);
            },
            py::arg("driver_count"), py::arg("step_count"), py::arg("horizon"),
            py::arg("terminal"))
        .def("refine", &WienerPath::refine)
        .def_property_readonly("driver_count", &WienerPath::driver_count)
        .def_property_readonly("step_count", &WienerPath::step_count)
        .def_property_readonly("horizon", &WienerPath::horizon)
        .def_property_readonly("seed", &WienerPath::seed)
        .def_property_readonly("level", &WienerPath::level)
        .def_property_readonly("times",
                               [](const WienerPath& p) {
                                   return std::vector<double>(p.times().begin(),
                                                              p.times().end());
                               })
        .def("value", &WienerPath::value, py::arg("driver"), py::arg("node"))
        .def("value_at", &WienerPath::value_at, py::arg("driver"), py::arg("t"));

    // pathwise solvers
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("lattice", &Trajectory::lattice)
        .def_readonly("record_times", &Trajectory::record_times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("path_seed", &Trajectory::path_seed)
        .def_readonly("path_level", &Trajectory::path_level)
        .def("state_at", &Trajectory::state_at, py::arg("t"),
             py::return_value_policy::reference_internal);

    m.def(
        "em_solve",
        [](const StencilSpec& spec, const GridFunction& psi, const WienerPath& path,
           const std::vector<double>& record_times) {
            ProblemData prob{psi, {}, {}, path.horizon()};
            return em_solve(spec, prob, path, record_times);
        },
        py::arg("spec"), py::arg("psi"), py::arg("path"), py::arg("record_times"));
    m.def(
        "fourier_exact_solve",
        [](const StencilSpec& spec, const std::vector<std::pair<int, std::complex<double>>>& raw,
           const Lattice& lat, const WienerPath& path, const std::vector<double>& record_times) {
            return fourier_exact_solve(spec, modes_from(raw), lat, path, record_times);
        },
        py::arg("spec"), py::arg("modes"), py::arg("lattice"), py::arg("path"),
        py::arg("record_times"));
    m.def(
        "continuum_exact_solve",
        [](const TargetPDE& pde, const std::vector<std::pair<int, std::complex<double>>>& raw,
           const Lattice& lat, const WienerPath& path, const std::vector<double>& record_times) {
            return continuum_exact_solve(pde, modes_from(raw), lat, path, record_times);
        },
        py::arg("pde"), py::arg("modes"), py::arg("lattice"), py::arg("path"),
        py::arg("record_times"));

    // extrapolation and order fitting
    py::class_<RichardsonWeights>(m, "RichardsonWeights")
        .def_property_readonly("order", [](const RichardsonWeights& w) { return w.order; })
        .def("as_doubles", &RichardsonWeights::as_doubles)
        .def("__repr__", &RichardsonWeights::str);
    m.def("richardson_weights", &richardson_weights, py::arg("order"), py::arg("power_step"));
    m.def(
        "extrapolate",
        [](const std::vector<Trajectory>& ladder, const RichardsonWeights& w) {
            return extrapolate(ladder, w);
        },
        py::arg("ladder"), py::arg("weights"));

    py::class_<OrderFit>(m, "OrderFit")
        .def_readonly("slope", &OrderFit::slope)
        .def_readonly("r_squared", &OrderFit::r_squared)
        .def_readonly("exact", &OrderFit::exact)
        .def_readonly("fitted", &OrderFit::fitted)
        .def_readonly("note", &OrderFit::note);
    m.def(
        "fit_order",
        [](const std::vector<std::pair<double, double>>& pts) { return fit_order(pts); },
        py::arg("h_and_error"));

    // config-driven harness
    py::class_<ExperimentConfig>(m, "ExperimentConfig");
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def(
        "run_convergence_json",
        [](const std::string& config_text, int threads) {
            ExperimentConfig cfg = parse_config(config_text);
            RunOptions opt;
            opt.threads = threads;
            ConvergenceReport rep = run_convergence(cfg, opt);
            std::ostringstream os;
            write_report_json(rep, os);
            return os.str();
        },
        py::arg("config_text"), py::arg("threads") = 1);
    m.def("scheme_from_config", [](const std::string& config_text) {
        return scheme_from_config(parse_config(config_text));
    });
    m.def("reproduce_example_2_4", []() {
        std::vector<std::tuple<std::string, double, double, double>> rows;
        for (const WorkedExampleRow& r : reproduce_example_2_4())
            rows.emplace_back(r.label, r.computed, r.printed, r.abs_diff);
        return rows;
    });
}
