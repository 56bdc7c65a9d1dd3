#include "hdg/driver.hpp"

#include "hdg/invariants.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hdg {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::converge: return "converge";
    case Command::solve: return "solve";
    default: return "verify";
  }
}
const char* to_string(SolverKind s) { return s == SolverKind::direct ? "direct" : "bicgstab"; }
const char* to_string(Material m) {
  switch (m) {
    case Material::constant: return "constant";
    case Material::c1: return "c1";
    default: return "c2";
  }
}
const char* to_string(Excitation e) { return e == Excitation::planewave ? "planewave" : "gaussian"; }

std::size_t cells_for_target(double side, double kappa) {
  const double h_target = 2.0 * std::numbers::pi / (8.0 * kappa);
  return std::max<std::size_t>(1, std::size_t(std::ceil(std::sqrt(2.0) * side / h_target - 1e-9)));
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions opt;
  opt.kind = config.solver;
  opt.tol = config.tol;
  opt.max_iter = config.max_iter;
  return opt;
}

void apply_material(ProblemData& data, const RunConfig& config) {
  const double lo = config.c_min, hi = config.c_max;
  if (config.material == Material::c1)
    data.coefficient = [lo, hi](const Point& x) { return material_c1(x, lo, hi); };
  else if (config.material == Material::c2)
    data.coefficient = [lo, hi](const Point& x) { return material_c2(x, lo, hi); };
}

}  // namespace

void RunConfig::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (degree < 0 || degree > max_basis_degree) throw std::invalid_argument("degree must be in [0, 6]");
  if (levels.empty()) throw std::invalid_argument("at least one level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == 0) throw std::invalid_argument("levels must be positive");
    if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("levels must be strictly ascending");
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("alpha and beta must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter <= 0) throw std::invalid_argument("max-iter must be positive");
  if (!(c_min > 0.0) || !(c_max > 0.0)) throw std::invalid_argument("material bounds must be positive");
  if (samples < 2) throw std::invalid_argument("samples must be at least 2");
}

RunConfig default_config(Command command) {
  RunConfig c;
  c.command = command;
  c.theta = std::numbers::pi / 6.0;
  return c;
}

double material_c1(const Point& x, double c_min, double c_max) {
  const double r = x.norm();
  return r < 0.5 ? 2.0 * r * c_min + (1.0 - 2.0 * r) * c_max : 1.0;
}

double material_c2(const Point& x, double c_min, double c_max) {
  const double r = x.norm();
  return r < 0.5 ? (1.0 - 2.0 * r) * c_min + 2.0 * r * c_max : 1.0;
}

Complex gaussian_excitation(const Point& x, const Point& n, double kappa) {
  if (n.x() > -0.5) return Complex(0.0);
  const double y = x.y() + 0.1;
  return Complex(0.0, -10.0 * kappa) * std::exp(-20.0 * y * y);
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& help_out) {
  CLI::App app{"Hybrid DG solver for the mixed Helmholtz equation with impedance boundary conditions"};
  app.require_subcommand(1);

  RunConfig cfg = default_config(Command::converge);
  std::optional<double> kappa;
  std::optional<int> degree;
  std::string solver = "direct", material = "constant", excitation = "planewave";

  const std::map<std::string, SolverKind> solvers{{"direct", SolverKind::direct}, {"bicgstab", SolverKind::bicgstab}};
  const std::map<std::string, Material> materials{
      {"constant", Material::constant}, {"c1", Material::c1}, {"c2", Material::c2}};
  const std::map<std::string, Excitation> excitations{{"planewave", Excitation::planewave},
                                                      {"gaussian", Excitation::gaussian}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--kappa", kappa, "wavenumber (default 5; 20 for the gaussian demo)");
    sub->add_option("--theta", cfg.theta, "plane-wave angle in radians")->capture_default_str();
    sub->add_option("--degree", degree, "polynomial degree p (default 1; 3 for the gaussian demo)");
    sub->add_option("--levels", cfg.levels, "cells per side, ascending")->delimiter(',')->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "trace stabilization")->capture_default_str();
    sub->add_option("--beta", cfg.beta, "flux stabilization")->capture_default_str();
    sub->add_option("--solver", solver, "direct | bicgstab")->check(CLI::IsMember({"direct", "bicgstab"}));
    sub->add_option("--tol", cfg.tol, "iterative tolerance")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "iteration limit")->capture_default_str();
    sub->add_option("--material", material, "constant | c1 | c2")->check(CLI::IsMember({"constant", "c1", "c2"}));
    sub->add_option("--c-min", cfg.c_min, "material minimum")->capture_default_str();
    sub->add_option("--c-max", cfg.c_max, "material maximum")->capture_default_str();
    sub->add_option("--excitation", excitation, "planewave | gaussian")
        ->check(CLI::IsMember({"planewave", "gaussian"}));
    sub->add_option("--out", cfg.out, "output CSV path (default stdout)");
    sub->add_option("--samples", cfg.samples, "sample grid resolution per direction")->capture_default_str();
    sub->add_option("--n", cfg.mesh_n, "cells per side for solve (default from h = 2 pi / (8 kappa))");
    sub->add_flag("--timing", cfg.timing, "write wall times into the CSV");
    sub->add_flag("--debug-flip-beta", cfg.flip_beta_sign, "fault injection: assemble -beta");
  };
  CLI::App* converge = app.add_subcommand("converge", "plane-wave convergence study");
  CLI::App* solve_cmd = app.add_subcommand("solve", "single solve with sampled field output");
  CLI::App* verify = app.add_subcommand("verify", "invariant and identity checks");
  for (CLI::App* sub : {converge, solve_cmd, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    for (CLI::App* sub : app.get_subcommands({})) help_out << sub->help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  if (solve_cmd->parsed()) cfg.command = Command::solve;
  else if (verify->parsed()) cfg.command = Command::verify;
  cfg.solver = solvers.at(solver);
  cfg.material = materials.at(material);
  cfg.excitation = excitations.at(excitation);
  const bool demo = cfg.command == Command::solve && cfg.excitation == Excitation::gaussian;
  cfg.kappa = kappa.value_or(demo ? 20.0 : 5.0);
  cfg.degree = degree.value_or(demo ? 3 : 1);
  cfg.validate();
  return cfg;
}

void write_config_header(std::ostream& os, const RunConfig& c) {
  os << "# command = " << to_string(c.command) << '\n';
  os << "# kappa = " << fmt(c.kappa) << '\n';
  os << "# theta = " << fmt(c.theta) << '\n';
  os << "# degree = " << c.degree << '\n';
  os << "# levels = ";
  for (std::size_t i = 0; i < c.levels.size(); ++i) os << (i ? "," : "") << c.levels[i];
  os << '\n';
  os << "# alpha = " << fmt(c.alpha) << '\n';
  os << "# beta = " << fmt(c.beta) << '\n';
  os << "# solver = " << to_string(c.solver) << '\n';
  os << "# tol = " << fmt(c.tol) << '\n';
  os << "# max_iter = " << c.max_iter << '\n';
  os << "# material = " << to_string(c.material) << '\n';
  os << "# c_min = " << fmt(c.c_min) << '\n';
  os << "# c_max = " << fmt(c.c_max) << '\n';
  os << "# excitation = " << to_string(c.excitation) << '\n';
  os << "# out = " << c.out << '\n';
  os << "# samples = " << c.samples << '\n';
  os << "# n = " << c.mesh_n << '\n';
  os << "# timing = " << int(c.timing) << '\n';
  os << "# debug_flip_beta = " << int(c.flip_beta_sign) << '\n';
}

ConvergenceReport run_converge(const RunConfig& config, std::ostream& os) {
  config.validate();
  if (config.excitation != Excitation::planewave)
    throw std::invalid_argument("converge requires the planewave excitation");

  const ExactSolution exact = plane_wave(config.kappa, config.theta);
  ProblemData data = exact.problem();
  data.alpha = config.alpha;
  data.beta = config.beta;
  data.flip_beta_sign = config.flip_beta_sign;
  apply_material(data, config);

  write_config_header(os, config);
  os << "N,h,ndof_volume,ndof_skeleton,err_u,err_sigma,err_proj_u,err_u_hat,err_sigma_hat,jump,"
        "identity_real,identity_imag,stability_ok,iterations,residual,converged,seconds\n";

  ConvergenceReport report;
  for (std::size_t n : config.levels) {
    const Discretization disc(build_structured_mesh(n), config.degree);
    LevelRecord rec;
    const Solution sol = solve(disc, data, solve_options(config), &rec.stats);
    rec.errors = compute_errors(disc, sol, exact, data);
    rec.identities = check_energy_identities(disc, sol, data);
    rec.stability = check_stability_bounds(disc, sol, data);
    const LevelErrors& e = rec.errors;
    os << n << ',' << fmt(e.h) << ',' << e.ndof_volume << ',' << e.ndof_skeleton << ',' << fmt(e.u) << ','
       << fmt(e.sigma) << ',' << fmt(e.projected_u) << ',' << fmt(e.trace) << ',' << fmt(e.flux_trace) << ','
       << fmt(e.jump) << ',' << fmt(rec.identities.real_part) << ',' << fmt(rec.identities.imag_part) << ','
       << int(rec.stability.boundary_bound && rec.stability.volume_bound) << ',' << rec.stats.iterations << ','
       << fmt(rec.stats.residual) << ',' << int(rec.stats.converged) << ','
       << (config.timing ? fmt(rec.stats.seconds) : std::string()) << '\n';
    report.levels.push_back(rec);
  }

  auto fit = [&](auto member) {
    std::vector<std::pair<double, double>> pts;
    for (const LevelRecord& r : report.levels)
      if (r.stats.converged) pts.emplace_back(r.errors.h, r.errors.*member);
    return fit_convergence_rate(pts);
  };
  report.u = fit(&LevelErrors::u);
  report.sigma = fit(&LevelErrors::sigma);
  report.projected_u = fit(&LevelErrors::projected_u);
  report.trace = fit(&LevelErrors::trace);
  report.flux_trace = fit(&LevelErrors::flux_trace);

  const auto slope = [](const RateFit& f) { return f.slope ? fmt(*f.slope) : std::string(); };
  os << "slope,,,," << slope(report.u) << ',' << slope(report.sigma) << ',' << slope(report.projected_u) << ','
     << slope(report.trace) << ',' << slope(report.flux_trace) << ",,,,,,,,\n";
  for (const RateFit* f : {&report.u, &report.sigma, &report.projected_u, &report.trace, &report.flux_trace})
    for (const std::string& w : f->warnings) os << "# warning: " << w << '\n';
  return report;
}

SolveReport run_solve(const RunConfig& config, std::ostream& os) {
  config.validate();
  SolveReport report;
  ProblemData data;
  data.kappa = config.kappa;
  data.alpha = config.alpha;
  data.beta = config.beta;
  data.flip_beta_sign = config.flip_beta_sign;

  std::optional<ExactSolution> exact;
  Point lower(0.0, 0.0), upper(1.0, 1.0);
  if (config.excitation == Excitation::gaussian) {
    lower = Point(-1.0, -1.0);
    const double kappa = config.kappa;
    data.excitation = [kappa](const Point& x, const Point& n) { return gaussian_excitation(x, n, kappa); };
  } else {
    exact = plane_wave(config.kappa, config.theta);
    data.excitation = exact->problem().excitation;
  }
  apply_material(data, config);

  report.n = config.mesh_n > 0 ? config.mesh_n : cells_for_target(upper.x() - lower.x(), config.kappa);
  // Variable coefficients are over-integrated; the energy checks reuse the same rule.
  const int quad = data.coefficient ? 2 * config.degree + 6 : -1;
  const Discretization disc(build_structured_mesh(report.n, lower, upper), config.degree, quad);
  const Solution sol = solve(disc, data, solve_options(config), &report.stats);
  report.identities = check_energy_identities(disc, sol, data);
  if (exact) report.errors = compute_errors(disc, sol, *exact, data);

  write_config_header(os, config);
  os << "# cells_per_side = " << report.n << '\n';
  os << "# ndof_volume = " << disc.volume_dim() << '\n';
  os << "# ndof_skeleton = " << disc.skeleton_dim() << '\n';
  os << "# iterations = " << report.stats.iterations << '\n';
  os << "# residual = " << fmt(report.stats.residual) << '\n';
  os << "# converged = " << int(report.stats.converged) << '\n';
  if (config.timing) os << "# seconds = " << fmt(report.stats.seconds) << '\n';
  os << "# identity_real = " << fmt(report.identities.real_part) << '\n';
  os << "# identity_imag = " << fmt(report.identities.imag_part) << '\n';
  if (report.errors) os << "# err_u = " << fmt(report.errors->u) << '\n';
  os << "x,y,re_u,im_u,abs_u\n";

  const Mesh& mesh = disc.mesh();
  const std::size_t s = config.samples;
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t i = 0; i < s; ++i) {
      const Point x(lower.x() + (upper.x() - lower.x()) * double(i) / double(s - 1),
                    lower.y() + (upper.y() - lower.y()) * double(j) / double(s - 1));
      const auto hit = mesh.locate(x);
      if (!hit) {
        ++report.samples_skipped;
        continue;
      }
      const Complex u = evaluate_scalar(disc, sol, hit->first, {hit->second})(0);
      if (exact) report.max_sample_error = std::max(report.max_sample_error, std::abs(u - exact->u(x)));
      os << fmt(x.x()) << ',' << fmt(x.y()) << ',' << fmt(u.real()) << ',' << fmt(u.imag()) << ','
         << fmt(std::abs(u)) << '\n';
      ++report.samples_written;
    }
  }
  if (report.samples_skipped) os << "# skipped_samples = " << report.samples_skipped << '\n';
  return report;
}

std::vector<VerifyItem> run_verify(const RunConfig& config, std::ostream& os) {
  config.validate();
  std::vector<VerifyItem> items;
  auto record = [&](std::string name, double observed, double threshold) {
    items.push_back({std::move(name), observed <= threshold, observed, threshold});
    const VerifyItem& it = items.back();
    os << (it.passed ? "PASS " : "FAIL ") << it.name << " observed=" << fmt(it.observed)
       << " threshold=" << fmt(it.threshold) << '\n';
  };

  // reference element
  double quad_err = 0.0;
  for (int d = 0; d <= 20; ++d)
    quad_err = std::max({quad_err, quadrature_exactness_error(RefDomain::triangle, d),
                         quadrature_exactness_error(RefDomain::segment, d)});
  record("quadrature exactness (degree <= 20)", quad_err, 1e-13);
  double dim_mismatch = 0.0, ortho = 0.0, div_res = 0.0, trace_res = 0.0;
  for (int p = 0; p <= max_basis_degree; ++p) {
    const RTBasis rt = build_rt_basis(p);
    const ScalarBasis tri = build_scalar_basis(RefDomain::triangle, p);
    const ScalarBasis seg = build_scalar_basis(RefDomain::segment, p);
    const auto pp = std::size_t(p);
    dim_mismatch += double(rt.dimension() != (pp + 1) * (pp + 3)) + double(tri.dimension() != (pp + 1) * (pp + 2) / 2) +
                    double(seg.dimension() != pp + 1);
    ortho = std::max({ortho, rt_orthonormality_error(rt), scalar_orthonormality_error(tri),
                      scalar_orthonormality_error(seg)});
    div_res = std::max(div_res, rt_divergence_residual(rt));
    trace_res = std::max(trace_res, rt_normal_trace_residual(rt));
  }
  record("basis dimensions (p <= 6)", dim_mismatch, 0.0);
  record("basis orthonormality (p <= 6)", ortho, 1e-12);
  record("div RT^p in P^p", div_res, 1e-12);
  record("normal trace of RT^p in P^p(F)", trace_res, 1e-12);

  // mesh
  double mesh_fail = 0.0, area_err = 0.0;
  for (std::size_t n = 1; n <= 16; ++n) {
    const MeshCheck mc = check_mesh(build_structured_mesh(n));
    mesh_fail += double(!mc.counts) + double(!mc.owners) + double(!mc.orientation);
    area_err = std::max(area_err, mc.area_error);
  }
  record("mesh counts, owners and orientation (N <= 16)", mesh_fail, 0.0);
  record("mesh area sum", area_err, 1e-14);

  auto problem = [&](double kappa) {
    ProblemData d = plane_wave(kappa, config.theta).problem();
    d.alpha = config.alpha;
    d.beta = config.beta;
    d.flip_beta_sign = config.flip_beta_sign;
    return d;
  };

  // condensation against the monolithic solve
  double cond_err = 0.0;
  for (double kappa : {1.0, 5.0}) {
    for (std::size_t n : {1, 2, 4}) {
      for (int p = 0; p <= 2; ++p) {
        const Discretization disc(build_structured_mesh(n), p);
        const ProblemData data = problem(kappa);
        const auto blocks = assemble_all(disc, data);
        const CondensedProblem cp = condense(disc, blocks);
        Solution s;
        s.skeleton = solve_direct(cp.system);
        s.volume = reconstruct_interior(disc, cp.elements, s.skeleton);
        const Solution m = solve_monolithic(disc, blocks);
        const double num = std::sqrt((s.volume - m.volume).squaredNorm() + (s.skeleton - m.skeleton).squaredNorm());
        const double den = std::sqrt(m.volume.squaredNorm() + m.skeleton.squaredNorm());
        cond_err = std::max(cond_err, num / den);
      }
    }
  }
  record("condensation vs monolithic", cond_err, 1e-9);

  // energy identities, stability bounds and facet elimination
  {
    const Discretization disc(build_structured_mesh(8), 2);
    const ProblemData data = problem(config.kappa);
    const Solution sol = solve(disc, data, {});
    const IdentityResiduals ir = check_energy_identities(disc, sol, data);
    record("energy identity, real part (N=8, p=2)", ir.real_part, 1e-8);
    record("energy identity, imaginary part (N=8, p=2)", ir.imag_part, 1e-8);
  }
  double stab_fail = 0.0;
  for (const auto& [kappa, n, p] : {std::tuple{config.kappa, std::size_t(8), 1}, std::tuple{50.0, std::size_t(8), 0},
                                    std::tuple{50.0, std::size_t(8), 1}}) {
    const Discretization disc(build_structured_mesh(n), p);
    const ProblemData data = problem(kappa);
    const StabilityCheck sc = check_stability_bounds(disc, solve(disc, data, {}), data);
    stab_fail += double(!sc.boundary_bound) + double(!sc.volume_bound);
  }
  record("stability bounds (including kappa=50, N=8)", stab_fail, 0.0);
  double elim = 0.0;
  for (int p = 0; p <= 2; ++p) {
    const Discretization disc(build_structured_mesh(4), p);
    const ProblemData data = problem(config.kappa);
    elim = std::max(elim, check_facet_elimination(disc, solve(disc, data, {}), data).max());
  }
  record("facet elimination identities (N=4)", elim, 1e-9);

  {
    const Discretization disc(build_structured_mesh(4), 1);
    ProblemData data = problem(config.kappa);
    data.excitation = nullptr;
    const Solution sol = solve(disc, data, {});
    record("zero excitation gives zero solution", std::max(sol.volume.cwiseAbs().maxCoeff(), sol.skeleton.cwiseAbs().maxCoeff()),
           1e-12);
  }
  return items;
}

int run_main(int argc, const char* const* argv) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_command_line(argc, argv, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_bad_config;
  }
  if (!cfg) return exit_ok;

  std::ofstream file;
  if (!cfg->out.empty()) {
    file.open(cfg->out);
    if (!file) {
      std::cerr << "error: cannot open " << cfg->out << '\n';
      return exit_bad_config;
    }
  }
  std::ostream& os = cfg->out.empty() ? std::cout : file;

  try {
    switch (cfg->command) {
      case Command::converge: {
        const ConvergenceReport r = run_converge(*cfg, os);
        const bool all = std::all_of(r.levels.begin(), r.levels.end(), [](const LevelRecord& l) { return l.stats.converged; });
        return all ? exit_ok : exit_not_converged;
      }
      case Command::solve: {
        const SolveReport r = run_solve(*cfg, os);
        std::cerr << "solve: N=" << r.n << " iterations=" << r.stats.iterations << " residual=" << r.stats.residual
                  << " seconds=" << r.stats.seconds << '\n';
        return r.stats.converged ? exit_ok : exit_not_converged;
      }
      case Command::verify: {
        const auto items = run_verify(*cfg, os);
        return std::all_of(items.begin(), items.end(), [](const VerifyItem& i) { return i.passed; })
                   ? exit_ok
                   : exit_verification_failed;
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_bad_config;
  }
  return exit_ok;
}

}  // namespace hdg
