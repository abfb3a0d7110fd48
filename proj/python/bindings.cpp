#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "cli.hpp"
#include "sle/analysis.hpp"
#include "sle/convergence.hpp"
#include "sle/driving.hpp"
#include "sle/error.hpp"
#include "sle/io.hpp"
#include "sle/moments.hpp"
#include "sle/reference.hpp"
#include "sle/splitting.hpp"
#include "sle/sweep.hpp"

namespace py = pybind11;
using namespace sle;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <class T>
py::array_t<T> to_array(std::span<const T> v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

DrivingSpec make_spec(const std::string& kind, double kappa, double reinforce, double hurst, std::uint64_t seed) {
    DrivingSpec s;
    s.kind = process_kind_from_string(kind);
    s.kappa = kappa;
    s.reinforcement = reinforce;
    s.hurst = hurst;
    s.seed = seed;
    s.validate();
    return s;
}

Trace trace_from(py::array_t<double> times, py::array_t<Complex> points) {
    auto t = times.unchecked<1>();
    auto p = points.unchecked<1>();
    if (t.shape(0) != p.shape(0)) throw ValidationError("times and points differ in length");
    Trace out;
    for (py::ssize_t i = 0; i < t.shape(0); ++i) {
        out.times.push_back(t(i));
        out.points.push_back(p(i));
    }
    return out;
}

py::dict fit_dict(const DimensionFit& f) {
    py::dict d;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["r_squared"] = f.r_squared;
    d["scales"] = to_array(f.scales);
    d["counts"] = to_array(f.counts);
    return d;
}

std::vector<Complex> as_points(py::array_t<Complex> points) {
    auto p = points.unchecked<1>();
    std::vector<Complex> out(static_cast<std::size_t>(p.shape(0)));
    for (py::ssize_t i = 0; i < p.shape(0); ++i) out[static_cast<std::size_t>(i)] = p(i);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Splitting simulation of Loewner traces";
    m.attr("__version__") = std::string(kGeneratorVersion);

    static py::exception<Error> base(m, "SleError", PyExc_RuntimeError);
    static py::exception<IoError> io(m, "IoError", base.ptr());
    static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
    static py::exception<NumericError> numeric(m, "NumericError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IoError& e) {
            py::set_error(io, e.what());
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const NumericError& e) {
            py::set_error(numeric, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("sqrt_h", &sqrt_h, py::arg("w"), "Square root with nonnegative imaginary part");
    m.def("slit_forward", &slit_forward, py::arg("z"), py::arg("level"), py::arg("duration"));
    m.def("slit_reverse", &slit_reverse, py::arg("z"), py::arg("level"), py::arg("duration"));
    m.def("sle_step", &sle_step, py::arg("z"), py::arg("h"), py::arg("dB"), py::arg("kappa"));

    m.def(
        "sample_driving",
        [](const std::string& kind, double horizon, std::size_t steps, double kappa, double reinforce, double hurst,
           std::uint64_t seed, bool force) {
            const DrivingPath p =
                sample_driving(Mesh::uniform(horizon, steps), make_spec(kind, kappa, reinforce, hurst, seed));
            const DrivingPath out = force ? p.as_force() : p;
            return py::make_tuple(to_array(out.mesh.times()), to_array(out.values));
        },
        py::arg("kind") = "sle", py::arg("T") = 1.0, py::arg("steps") = 1024, py::arg("kappa") = 0.0,
        py::arg("reinforce") = 0.0, py::arg("hurst") = 0.5, py::arg("seed") = 0, py::arg("force") = false,
        "Driving path (times, values); `force` scales to driving-force units");

    m.def(
        "power_interpolate",
        [](double horizon, std::vector<double> values, double exponent, unsigned factor) {
            if (values.size() < 2) throw ValidationError("need at least two samples");
            const Mesh mesh = Mesh::uniform(horizon, values.size() - 1);
            const DrivingPath out =
                power_interpolate(DrivingPath{mesh, std::move(values), DrivingSpec{}}, exponent, factor);
            return py::make_tuple(to_array(out.mesh.times()), to_array(out.values));
        },
        py::arg("T"), py::arg("values"), py::arg("exponent"), py::arg("factor"));

    m.def(
        "simulate",
        [](const std::string& kind, double kappa, std::size_t steps, double y0, double horizon, std::uint64_t seed,
           double reinforce, double hurst, bool shift, double rel_step, double floor) {
            SimulationOptions o;
            o.shift_to_forward = shift;
            o.integrator = {rel_step, floor};
            const Trace t = simulate(make_spec(kind, kappa, reinforce, hurst, seed),
                                     FidelitySchedule::practical(steps, y0, horizon), o);
            py::dict d;
            d["times"] = to_array(t.times);
            d["points"] = to_array(t.points);
            d["applied_shift"] = t.applied_shift;
            d["variant"] = to_string(t.variant);
            return d;
        },
        py::arg("kind") = "sle", py::arg("kappa") = 4.0, py::arg("steps") = 16384, py::arg("y0") = 0.01,
        py::arg("T") = 1.0, py::arg("seed") = 0, py::arg("reinforce") = 0.0, py::arg("hurst") = 0.5,
        py::arg("shift") = false, py::arg("rel_step") = 5e-3, py::arg("floor") = 1e-8);

    m.def(
        "forward_point",
        [](Complex z, double horizon, std::vector<double> values) {
            if (values.size() < 2) throw ValidationError("need at least two samples");
            const Mesh mesh = Mesh::uniform(horizon, values.size() - 1);
            return forward_point(z, DrivingPath{mesh, std::move(values), DrivingSpec{}});
        },
        py::arg("z"), py::arg("T"), py::arg("values"), "Forward Loewner flow of one point, lambda on a uniform mesh");

    m.def(
        "quadrature_moments",
        [](double kappa, double y0, double horizon, std::size_t steps, std::size_t nodes) {
            const MomentReport r = quadrature_moments(kappa, y0, horizon, steps, nodes);
            std::vector<double> t, m2, m4, e2, e4;
            for (const MomentRow& row : r.rows) {
                t.push_back(row.t);
                m2.push_back(row.m2.real());
                m4.push_back(row.m4.real());
                e2.push_back(row.expected_m2);
                e4.push_back(row.expected_m4);
            }
            py::dict d;
            d["t"] = to_array(t);
            d["m2"] = to_array(m2);
            d["m4"] = to_array(m4);
            d["expected_m2"] = to_array(e2);
            d["expected_m4"] = to_array(e4);
            d["max_deviation_m2"] = r.max_deviation_m2;
            d["max_deviation_m4"] = r.max_deviation_m4;
            return d;
        },
        py::arg("kappa"), py::arg("y0") = 0.1, py::arg("T") = 1.0, py::arg("steps") = 256, py::arg("nodes") = 20);

    m.def(
        "closed_form_moments",
        [](double kappa, double y0, double t) {
            return py::make_tuple(second_moment_closed_form(kappa, y0, t), fourth_moment_closed_form(kappa, y0, t));
        },
        py::arg("kappa"), py::arg("y0"), py::arg("t"), "(E[Z_t^2], E[Z_t^4]) of the reverse flow");

    m.def(
        "box_dimension",
        [](py::array_t<Complex> points, bool multi_offset) {
            BoxScaleSpec spec;
            spec.multi_offset = multi_offset;
            return fit_dict(box_dimension(as_points(points), spec));
        },
        py::arg("points"), py::arg("multi_offset") = false);
    m.def(
        "yardstick_dimension", [](py::array_t<Complex> points) { return fit_dict(yardstick_dimension(as_points(points))); },
        py::arg("points"));

    m.def(
        "sup_distance",
        [](py::array_t<double> ta, py::array_t<Complex> pa, py::array_t<double> tb, py::array_t<Complex> pb,
           bool common) {
            return sup_distance(trace_from(ta, pa), trace_from(tb, pb),
                                common ? Alignment::CommonTimes : Alignment::UnionMesh);
        },
        py::arg("times_a"), py::arg("points_a"), py::arg("times_b"), py::arg("points_b"),
        py::arg("common_times") = false);

    m.def(
        "dimension_sweep",
        [](std::vector<double> kappas, std::vector<double> hursts, std::size_t paths, std::size_t steps, double y0,
           std::uint64_t seed, unsigned workers) {
            SweepConfig c;
            c.kappas = std::move(kappas);
            c.hursts = std::move(hursts);
            c.paths_per_cell = paths;
            c.schedule = FidelitySchedule::practical(steps, y0, 1.0);
            c.seed = seed;
            c.workers = workers;
            py::gil_scoped_release release;
            SweepResult r = dimension_sweep(c);
            py::gil_scoped_acquire acquire;
            py::list cells;
            for (const SweepCell& cell : r.cells) {
                py::dict d;
                d["kappa"] = cell.kappa;
                d["hurst"] = cell.hurst;
                d["mean_df"] = cell.mean_df;
                d["stderr"] = cell.stderr_df;
                d["paths"] = cell.paths;
                d["failures"] = cell.failures;
                cells.append(d);
            }
            py::dict d;
            d["cells"] = cells;
            d["tau_kappa"] = r.tau_kappa;
            d["tau_hurst"] = r.tau_hurst;
            return d;
        },
        py::arg("kappas"), py::arg("hursts"), py::arg("paths") = 5, py::arg("steps") = 16384, py::arg("y0") = 0.01,
        py::arg("seed") = 0, py::arg("workers") = 1);

    m.def(
        "convergence_study",
        [](double kappa, unsigned min_level, unsigned max_level, std::size_t paths, std::uint64_t seed,
           bool euler, unsigned euler_level, unsigned workers) {
            ConvergenceConfig c;
            c.kappa = kappa;
            c.min_level = min_level;
            c.max_level = max_level;
            c.paths = paths;
            c.seed = seed;
            c.reference = euler ? ConvergenceReference::FineEuler : ConvergenceReference::NextLevel;
            c.euler_level = euler_level;
            c.workers = workers;
            py::gil_scoped_release release;
            ConvergenceReport r = convergence_study(c);
            py::gil_scoped_acquire acquire;
            std::vector<double> sup, l2;
            std::vector<unsigned> levels;
            for (const ConvergenceLevel& l : r.levels) {
                levels.push_back(l.level);
                sup.push_back(l.median_sup);
                l2.push_back(l.median_l2);
            }
            py::dict d;
            d["levels"] = levels;
            d["median_sup"] = to_array(sup);
            d["median_l2"] = to_array(l2);
            d["empirical_order"] = r.empirical_order;
            d["monotone"] = r.monotone;
            return d;
        },
        py::arg("kappa") = 2.0, py::arg("min_level") = 8, py::arg("max_level") = 13, py::arg("paths") = 20,
        py::arg("seed") = 0, py::arg("euler") = false, py::arg("euler_level") = 20, py::arg("workers") = 1);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "sle");
            std::vector<const char*> argv;
            for (const std::string& a : args) argv.push_back(a.c_str());
            return cli::run(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "Run the command-line tool in-process; returns its exit code");
}
