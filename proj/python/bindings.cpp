#include "hdg/driver.hpp"
#include "hdg/invariants.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

namespace py = pybind11;
using namespace hdg;

namespace {

py::dict errors_dict(const LevelErrors& e) {
  py::dict d;
  d["n"] = e.n;
  d["h"] = e.h;
  d["ndof_volume"] = e.ndof_volume;
  d["ndof_skeleton"] = e.ndof_skeleton;
  d["u"] = e.u;
  d["sigma"] = e.sigma;
  d["projected_u"] = e.projected_u;
  d["trace"] = e.trace;
  d["flux_trace"] = e.flux_trace;
  d["jump"] = e.jump;
  return d;
}

py::dict stats_dict(const SolverStats& s) {
  py::dict d;
  d["iterations"] = s.iterations;
  d["residual"] = s.residual;
  d["converged"] = s.converged;
  return d;
}

py::object slope(const RateFit& f) { return f.slope ? py::cast(*f.slope) : py::none(); }

// Release the GIL around long solves; the config is copied first.
template <class Report, class Fn>
std::pair<Report, std::string> run_captured(const RunConfig& cfg, Fn fn) {
  cfg.validate();
  std::ostringstream os;
  py::gil_scoped_release unlocked;
  Report r = fn(cfg, os);
  return {std::move(r), os.str()};
}

}  // namespace

PYBIND11_MODULE(hdg_helmholtz, m) {
  m.doc() = "Hybridizable discontinuous Galerkin solver for the 2D Helmholtz impedance problem";

  py::enum_<Command>(m, "Command")
      .value("converge", Command::converge)
      .value("solve", Command::solve)
      .value("verify", Command::verify);
  py::enum_<Material>(m, "Material")
      .value("constant", Material::constant)
      .value("c1", Material::c1)
      .value("c2", Material::c2);
  py::enum_<Excitation>(m, "Excitation").value("planewave", Excitation::planewave).value("gaussian", Excitation::gaussian);
  py::enum_<SolverKind>(m, "SolverKind").value("direct", SolverKind::direct).value("bicgstab", SolverKind::bicgstab);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init([](Command c) { return default_config(c); }), py::arg("command") = Command::converge)
      .def_readwrite("kappa", &RunConfig::kappa)
      .def_readwrite("theta", &RunConfig::theta)
      .def_readwrite("degree", &RunConfig::degree)
      .def_readwrite("levels", &RunConfig::levels)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("beta", &RunConfig::beta)
      .def_readwrite("solver", &RunConfig::solver)
      .def_readwrite("tol", &RunConfig::tol)
      .def_readwrite("max_iter", &RunConfig::max_iter)
      .def_readwrite("material", &RunConfig::material)
      .def_readwrite("c_min", &RunConfig::c_min)
      .def_readwrite("c_max", &RunConfig::c_max)
      .def_readwrite("excitation", &RunConfig::excitation)
      .def_readwrite("samples", &RunConfig::samples)
      .def_readwrite("mesh_n", &RunConfig::mesh_n)
      .def("validate", &RunConfig::validate);

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](std::size_t n, std::pair<double, double> lo, std::pair<double, double> hi) {
             return build_structured_mesh(n, Point(lo.first, lo.second), Point(hi.first, hi.second));
           }),
           py::arg("n"), py::arg("lower") = std::pair{0.0, 0.0}, py::arg("upper") = std::pair{1.0, 1.0})
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_elements", &Mesh::num_elements)
      .def_property_readonly("num_facets", &Mesh::num_facets)
      .def_property_readonly("num_boundary_facets", &Mesh::num_boundary_facets)
      .def_property_readonly("h_max", &Mesh::h_max)
      .def_property_readonly("vertices",
                             [](const Mesh& mesh) {
                               Eigen::MatrixX2d v(mesh.num_vertices(), 2);
                               for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v.row(Eigen::Index(i)) = mesh.vertices()[i];
                               return v;
                             })
      .def("element", &Mesh::element)
      .def("element_area", &Mesh::element_area)
      .def("locate", [](const Mesh& mesh, double x, double y) -> std::optional<std::size_t> {
        const auto hit = mesh.locate(Point(x, y));
        if (!hit) return std::nullopt;
        return hit->first;
      });

  m.def(
      "plane_wave_solve",
      [](std::size_t n, int p, double kappa, double theta, double alpha, double beta, SolverKind solver, double tol,
         int max_iter) {
        py::dict out;
        const Discretization disc(build_structured_mesh(n), p);
        const ExactSolution ex = plane_wave(kappa, theta);
        ProblemData data = ex.problem();
        data.alpha = alpha;
        data.beta = beta;
        data.validate();
        SolveOptions opt;
        opt.kind = solver;
        opt.tol = tol;
        opt.max_iter = max_iter;
        SolverStats stats;
        Solution sol;
        {
          py::gil_scoped_release unlocked;
          sol = solve(disc, data, opt, &stats);
        }
        const IdentityResiduals id = check_energy_identities(disc, sol, data);
        const StabilityCheck st = check_stability_bounds(disc, sol, data);
        out["errors"] = errors_dict(compute_errors(disc, sol, ex, data));
        out["identity_real"] = id.real_part;
        out["identity_imag"] = id.imag_part;
        out["stable"] = st.boundary_bound && st.volume_bound;
        out["facet_elimination"] = check_facet_elimination(disc, sol, data).max();
        out["stats"] = stats_dict(stats);
        out["skeleton"] = sol.skeleton;
        out["volume"] = sol.volume;
        return out;
      },
      py::arg("n"), py::arg("degree"), py::arg("kappa") = 5.0, py::arg("theta") = std::numbers::pi / 6,
      py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("solver") = SolverKind::direct,
      py::arg("tol") = default_iterative_tolerance, py::arg("max_iter") = 5000,
      "Solve the plane-wave problem on the unit square and report errors and identity residuals.");

  m.def(
      "converge",
      [](const RunConfig& cfg) {
        auto [r, csv] = run_captured<ConvergenceReport>(cfg, run_converge);
        py::dict out;
        py::list levels;
        for (const LevelRecord& l : r.levels) {
          py::dict d = errors_dict(l.errors);
          d["identity_real"] = l.identities.real_part;
          d["identity_imag"] = l.identities.imag_part;
          d["stable"] = l.stability.boundary_bound && l.stability.volume_bound;
          d["stats"] = stats_dict(l.stats);
          levels.append(d);
        }
        out["levels"] = levels;
        py::dict slopes;
        slopes["u"] = slope(r.u);
        slopes["sigma"] = slope(r.sigma);
        slopes["projected_u"] = slope(r.projected_u);
        slopes["trace"] = slope(r.trace);
        slopes["flux_trace"] = slope(r.flux_trace);
        out["slopes"] = slopes;
        out["csv"] = csv;
        return out;
      },
      py::arg("config"), "Run a rate study; returns per-level records, fitted slopes and the CSV text.");

  m.def(
      "solve",
      [](const RunConfig& cfg) {
        auto [r, csv] = run_captured<SolveReport>(cfg, run_solve);
        py::dict out;
        out["n"] = r.n;
        out["stats"] = stats_dict(r.stats);
        out["identity_real"] = r.identities.real_part;
        out["identity_imag"] = r.identities.imag_part;
        out["samples_written"] = r.samples_written;
        out["samples_skipped"] = r.samples_skipped;
        out["errors"] = r.errors ? py::object(errors_dict(*r.errors)) : py::none();
        out["csv"] = csv;
        return out;
      },
      py::arg("config"), "Single solve sampled on a grid; returns statistics and the CSV text.");

  m.def(
      "verify",
      [](const RunConfig& cfg) {
        auto [items, text] = run_captured<std::vector<VerifyItem>>(cfg, run_verify);
        py::list out;
        for (const VerifyItem& it : items) out.append(py::make_tuple(it.name, it.passed, it.observed, it.threshold));
        return out;
      },
      py::arg("config"), "Run the invariant suite; returns (name, passed, observed, threshold) tuples.");

  m.def("material_c1", [](double x, double y, double lo, double hi) { return material_c1(Point(x, y), lo, hi); },
        py::arg("x"), py::arg("y"), py::arg("c_min") = 0.02, py::arg("c_max") = 50.0);
  m.def("material_c2", [](double x, double y, double lo, double hi) { return material_c2(Point(x, y), lo, hi); },
        py::arg("x"), py::arg("y"), py::arg("c_min") = 0.02, py::arg("c_max") = 50.0);
  m.def("quadrature_exactness_error", [](bool triangle, int degree) {
    return quadrature_exactness_error(triangle ? RefDomain::triangle : RefDomain::segment, degree);
  });
  m.def("rt_divergence_residual", [](int p) { return rt_divergence_residual(build_rt_basis(p)); });

}
