// Python bindings for the main operations: radial oracle, grids and fields,
// both solvers, the cone envelope, free-boundary diagnostics, experiments.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infobs/cone_envelope.hpp"
#include "infobs/experiments.hpp"
#include "infobs/fb_analysis.hpp"
#include "infobs/radial_oracle.hpp"
#include "infobs/solver_inf.hpp"
#include "infobs/solver_p.hpp"

namespace py = pybind11;
using namespace infobs;

namespace {

InfSolveOptions make_inf_options(double stencil_radius, double sweep_tol, long max_sweeps,
                                 bool gauss_seidel, const std::string& init,
                                 const ScalarField* init_field) {
    InfSolveOptions o;
    o.stencil_radius = stencil_radius;
    o.sweep_tol = sweep_tol;
    o.max_sweeps = max_sweeps;
    o.gauss_seidel = gauss_seidel;
    if (init == "upper_constant") {
        o.init = InfSolveOptions::Init::upper_constant;
    } else if (init == "cone_envelope") {
        o.init = InfSolveOptions::Init::cone_envelope;
    } else if (init == "custom") {
        o.init = InfSolveOptions::Init::custom;
        o.init_field = init_field;
    } else {
        throw std::invalid_argument("init must be upper_constant, cone_envelope or custom");
    }
    return o;
}

}  // namespace

PYBIND11_MODULE(_infobs, m) {
    m.doc() = "numerical laboratory for the constrained infinity-Laplace problem";
    m.attr("__version__") = kVersion;
    m.attr("H_INF") = kHInf;

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("norm", &Vec2::norm)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
        });

    py::class_<Disk>(m, "Disk")
        .def(py::init<Vec2, double>(), py::arg("center"), py::arg("radius"))
        .def_readwrite("center", &Disk::center)
        .def_readwrite("radius", &Disk::radius);
    py::class_<Box>(m, "Box")
        .def(py::init<Vec2, Vec2>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Box::lo)
        .def_readwrite("hi", &Box::hi);
    py::class_<Dumbbell>(m, "Dumbbell")
        .def(py::init<double, double, double>(), py::arg("ball_radius"), py::arg("tube_halfwidth"),
             py::arg("separation"))
        .def_readwrite("ball_radius", &Dumbbell::ball_radius)
        .def_readwrite("tube_halfwidth", &Dumbbell::tube_halfwidth)
        .def_readwrite("separation", &Dumbbell::separation);

    py::class_<SphericalCap>(m, "SphericalCap")
        .def(py::init<Vec2, double>(), py::arg("center"), py::arg("height"))
        .def_readwrite("center", &SphericalCap::center)
        .def_readwrite("height", &SphericalCap::height);
    py::class_<AronssonFn>(m, "Aronsson").def(py::init<>());
    py::class_<ConstantFn>(m, "Constant")
        .def(py::init<double>(), py::arg("value"))
        .def_readwrite("value", &ConstantFn::value);
    py::class_<AffineFn>(m, "Affine")
        .def(py::init<Vec2, double>(), py::arg("slope"), py::arg("offset"))
        .def_readwrite("slope", &AffineFn::slope)
        .def_readwrite("offset", &AffineFn::offset);
    py::class_<BarrierFn>(m, "Barrier")
        .def(py::init<double, Vec2>(), py::arg("nu"), py::arg("center"))
        .def_readwrite("nu", &BarrierFn::nu)
        .def_readwrite("center", &BarrierFn::center);
    py::class_<CustomTable>(m, "CustomTable")
        .def(py::init<std::vector<double>>(), py::arg("values"))
        .def_readwrite("values", &CustomTable::values);

    py::class_<Grid>(m, "Grid")
        .def_readonly("spacing", &Grid::spacing)
        .def_readonly("n_nodes", &Grid::n_nodes)
        .def_readonly("n_interior", &Grid::n_interior)
        .def_readonly("n_boundary", &Grid::n_boundary)
        .def("pos", &Grid::pos, py::arg("c"))
        .def("is_interior", &Grid::is_interior, py::arg("c"))
        .def("nearest_node", &Grid::nearest_node, py::arg("q"));
    m.def("build_grid", &build_grid, py::arg("domain"), py::arg("spacing"));

    py::class_<ScalarField>(m, "ScalarField")
        .def("__len__", [](const ScalarField& f) { return f.v.size(); })
        .def("__getitem__",
             [](const ScalarField& f, std::size_t c) {
                 if (c >= f.v.size()) throw py::index_error();
                 return f.v[c];
             })
        .def("values", [](const ScalarField& f) { return f.v; });
    py::class_<Mask>(m, "Mask")
        .def("count", &Mask::count)
        .def("__contains__",
             [](const Mask& mk, std::size_t c) { return c < mk.in.size() && mk.in[c] != 0; })
        .def("nodes", [](const Mask& mk) {
            std::vector<std::int32_t> out;
            for (std::size_t c = 0; c < mk.in.size(); ++c)
                if (mk.in[c]) out.push_back(std::int32_t(c));
            return out;
        });

    m.def("sample_field", &sample_field, py::arg("grid"), py::arg("spec"),
          py::keep_alive<0, 1>());
    m.def("eval_analytic", &eval_analytic, py::arg("spec"), py::arg("x"));

    // radial oracle
    py::class_<RadialSolution>(m, "RadialSolution")
        .def_readonly("p", &RadialSolution::p)
        .def_readonly("d", &RadialSolution::d)
        .def_readonly("alpha", &RadialSolution::alpha)
        .def_readonly("h", &RadialSolution::h)
        .def_readonly("a", &RadialSolution::a)
        .def_readonly("b", &RadialSolution::b);
    m.def("solve_h", &solve_h, py::arg("p"), py::arg("d") = 2);
    m.def("radial_profile", &radial_profile, py::arg("p"), py::arg("d") = 2);
    m.def("eval_radial", &eval_radial, py::arg("profile"), py::arg("r"));
    m.def("radial_gap", &radial_gap, py::arg("profile"), py::arg("r"));

    // limit solver
    py::class_<InfSolveResult>(m, "InfSolveResult")
        .def_readonly("solution", &InfSolveResult::solution)
        .def_readonly("sweeps", &InfSolveResult::sweeps)
        .def_readonly("converged", &InfSolveResult::converged)
        .def_readonly("final_change", &InfSolveResult::final_change)
        .def_readonly("est_gap", &InfSolveResult::est_gap)
        .def_readonly("stencil_radius", &InfSolveResult::stencil_radius)
        .def_readonly("sweep_tol", &InfSolveResult::sweep_tol)
        .def_readonly("reduced_accuracy", &InfSolveResult::reduced_accuracy);
    m.def(
        "solve_obstacle_inf",
        [](const Grid& g, const AnalyticSpec& obstacle, const AnalyticSpec& boundary,
           double stencil_radius, double sweep_tol, long max_sweeps, bool gauss_seidel,
           const std::string& init, const ScalarField* init_field) {
            return solve_obstacle_inf(g, obstacle, boundary,
                                      make_inf_options(stencil_radius, sweep_tol, max_sweeps,
                                                       gauss_seidel, init, init_field));
        },
        py::arg("grid"), py::arg("obstacle"), py::arg("boundary"), py::arg("stencil_radius") = 0.0,
        py::arg("sweep_tol") = 0.0, py::arg("max_sweeps") = 2'000'000,
        py::arg("gauss_seidel") = false, py::arg("init") = "upper_constant",
        py::arg("init_field") = nullptr, py::keep_alive<0, 1>());
    m.def("coincidence_set", &coincidence_set, py::arg("u"), py::arg("psi"), py::arg("eps") = 0.0,
          py::keep_alive<0, 1>());
    m.def("tangent_contact", &tangent_contact, py::arg("g"), py::arg("dg"), py::arg("x_end"),
          py::arg("f_end"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-12);

    // energy minimizer
    py::class_<PSolveResult>(m, "PSolveResult")
        .def_readonly("solution", &PSolveResult::solution)
        .def_readonly("energy", &PSolveResult::energy)
        .def_readonly("lp_norm", &PSolveResult::lp_norm)
        .def_readonly("iterations", &PSolveResult::iterations)
        .def_readonly("converged", &PSolveResult::converged)
        .def_readonly("pinned", &PSolveResult::pinned)
        .def_readonly("stages", &PSolveResult::stages);
    m.def(
        "solve_obstacle_p",
        [](const Grid& g, const AnalyticSpec& obstacle, const AnalyticSpec& boundary, double p,
           bool continuation, long max_iters, double step_tol) {
            PSolveOptions o;
            o.p = p;
            o.continuation = continuation;
            o.max_iters = max_iters;
            o.step_tol = step_tol;
            return solve_obstacle_p(g, obstacle, boundary, o);
        },
        py::arg("grid"), py::arg("obstacle"), py::arg("boundary"), py::arg("p") = 10.0,
        py::arg("continuation") = true, py::arg("max_iters") = 30000,
        py::arg("step_tol") = 1e-11, py::keep_alive<0, 1>());
    m.def(
        "energy_p",
        [](const ScalarField& u, double p) {
            const EnergyValue e = energy_p(u, p);
            return py::make_tuple(e.value, e.lp_norm);
        },
        py::arg("u"), py::arg("p"));

    // cone envelope
    m.def(
        "admissible_min_cone",
        [](const std::vector<std::pair<double, double>>& cloud, double r_x) {
            std::vector<CloudPoint> pts;
            pts.reserve(cloud.size());
            for (auto& [r, gval] : cloud) pts.push_back({r, gval});
            const MinConeResult res = admissible_min_cone(pts, r_x);
            return py::make_tuple(res.value, res.base, res.slope);
        },
        py::arg("cloud"), py::arg("r_x"));
    m.def(
        "cone_envelope",
        [](const Grid& g, const ScalarField& psi, const AnalyticSpec& boundary) {
            return cone_envelope(g, psi, boundary).field;
        },
        py::arg("grid"), py::arg("psi"), py::arg("boundary"), py::keep_alive<0, 1>());

    // free-boundary diagnostics
    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("slope", &ExponentFit::slope)
        .def_readonly("intercept", &ExponentFit::intercept)
        .def_readonly("r_min", &ExponentFit::r_min)
        .def_readonly("r_max", &ExponentFit::r_max)
        .def_readonly("rms", &ExponentFit::rms)
        .def_readonly("samples", &ExponentFit::samples);
    m.def("free_boundary_cells", &free_boundary_cells, py::arg("mask"));
    m.def("growth_exponent", &growth_exponent, py::arg("u"), py::arg("psi"), py::arg("x0"),
          py::arg("r_min"), py::arg("r_max"), py::arg("n_radii"));
    m.def("positive_density", &positive_density, py::arg("detached"), py::arg("x0"),
          py::arg("rho"));
    m.def("hausdorff_one_sided", &hausdorff_one_sided, py::arg("a"), py::arg("b"));

    // packaged experiments
    py::class_<RunResult>(m, "RunResult")
        .def_readonly("pass_", &RunResult::pass)
        .def_readonly("manifest_path", &RunResult::manifest_path)
        .def_readonly("failed_gates", &RunResult::failed_gates)
        .def("__bool__", [](const RunResult& r) { return r.pass; });
    m.def(
        "run_experiment",
        [](const std::string& name, const std::string& out_dir, long seed) {
            ExperimentConfig cfg = default_config(name);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (seed >= 0) cfg.seed = std::uint64_t(seed);
            return run_experiment(cfg);
        },
        py::arg("name"), py::arg("out_dir") = "", py::arg("seed") = -1);
    m.def(
        "run_experiment_file",
        [](const std::string& path) { return run_experiment(config_from_json_file(path)); },
        py::arg("path"));
}
