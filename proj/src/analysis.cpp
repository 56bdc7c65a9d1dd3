#include "hdg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdg {

namespace {

constexpr Complex j_unit(0.0, 1.0);

double relative(double residual2, double norm2) {
  const double r = std::sqrt(residual2);
  const double n = std::sqrt(norm2);
  return n > 0.0 ? r / n : r;
}

std::vector<Point> physical_points(const AffineMap& map, const std::vector<Point>& ref) {
  std::vector<Point> x;
  x.reserve(ref.size());
  for (const Point& p : ref) x.push_back(map.map(p));
  return x;
}

Eigen::VectorXcd facet_coefficients(const Discretization& disc, const Solution& sol, std::size_t f, FacetVariable var) {
  return sol.skeleton.segment(Eigen::Index(disc.skeleton_dof(f, var, 0)), Eigen::Index(disc.facet_dim()));
}

}  // namespace

ProblemData ExactSolution::problem() const {
  ProblemData data;
  data.kappa = kappa;
  data.excitation = [self = *this](const Point& x, const Point& n) { return self.g(x, n); };
  return data;
}

ExactSolution plane_wave(double kappa, double theta) {
  const Point d(std::cos(theta), std::sin(theta));
  ExactSolution ex;
  ex.kappa = kappa;
  ex.u = [kappa, d](const Point& x) { return std::exp(j_unit * kappa * d.dot(x)); };
  ex.grad_u = [kappa, d](const Point& x) {
    const Complex v = j_unit * kappa * std::exp(j_unit * kappa * d.dot(x));
    return Vector2c(v * d.x(), v * d.y());
  };
  return ex;
}

Eigen::VectorXcd evaluate_scalar(const Discretization& disc, const Solution& sol, std::size_t e,
                                 const std::vector<Point>& ref_points) {
  const Eigen::MatrixXd vals = disc.element_basis(e).scalar_values(ref_points);
  const auto ni = Eigen::Index(disc.interior_dim());
  const Eigen::VectorXcd coeff =
      sol.volume.segment(Eigen::Index(e) * ni + Eigen::Index(disc.flux_dim()), Eigen::Index(disc.scalar_dim()));
  return vals.transpose().cast<Complex>() * coeff;
}

Eigen::MatrixXcd evaluate_flux(const Discretization& disc, const Solution& sol, std::size_t e,
                               const std::vector<Point>& ref_points) {
  const VectorValues vals = disc.element_basis(e).flux_values(ref_points);
  const auto ni = Eigen::Index(disc.interior_dim());
  const Eigen::VectorXcd coeff = sol.volume.segment(Eigen::Index(e) * ni, Eigen::Index(disc.flux_dim()));
  Eigen::MatrixXcd out(2, Eigen::Index(ref_points.size()));
  out.row(0) = (vals.x.transpose().cast<Complex>() * coeff).transpose();
  out.row(1) = (vals.y.transpose().cast<Complex>() * coeff).transpose();
  return out;
}

Eigen::VectorXcd evaluate_facet(const Discretization& disc, const Solution& sol, std::size_t f, FacetVariable var,
                                const std::vector<double>& t) {
  std::vector<Point> pts;
  pts.reserve(t.size());
  for (double s : t) pts.emplace_back(s, 0.0);
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(pts);
  return mu.transpose().cast<Complex>() * facet_coefficients(disc, sol, f, var);
}

QuadratureRule analysis_rule(const Discretization& disc, RefDomain domain) {
  return make_quadrature(domain, 2 * disc.degree() + 7);
}

Eigen::VectorXcd l2_project_volume(const Discretization& disc, std::size_t e,
                                   const std::function<Complex(const Point&)>& f) {
  const QuadratureRule rule = analysis_rule(disc, RefDomain::triangle);
  const ElementBasis& basis = disc.element_basis(e);
  const Eigen::MatrixXd vals = basis.scalar_values(rule.points);
  const std::vector<Point> x = physical_points(basis.map(), rule.points);
  const auto n = vals.rows();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q] * std::abs(basis.map().det);
    const auto col = vals.col(Eigen::Index(q));
    mass.noalias() += w * col * col.transpose();
    load += (w * f(x[q])) * col.cast<Complex>();
  }
  return mass.ldlt().solve(Eigen::MatrixXd::Identity(n, n)).cast<Complex>() * load;
}

Eigen::VectorXcd l2_project_flux(const Discretization& disc, std::size_t e,
                                 const std::function<Vector2c(const Point&)>& f) {
  const QuadratureRule rule = analysis_rule(disc, RefDomain::triangle);
  const ElementBasis& basis = disc.element_basis(e);
  const VectorValues vals = basis.flux_values(rule.points);
  const std::vector<Point> x = physical_points(basis.map(), rule.points);
  const auto n = vals.x.rows();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q] * std::abs(basis.map().det);
    const auto cx = vals.x.col(Eigen::Index(q));
    const auto cy = vals.y.col(Eigen::Index(q));
    mass.noalias() += w * (cx * cx.transpose() + cy * cy.transpose());
    const Vector2c fx = f(x[q]);
    load += w * (fx.x() * cx.cast<Complex>() + fx.y() * cy.cast<Complex>());
  }
  return mass.ldlt().solve(Eigen::MatrixXd::Identity(n, n)).cast<Complex>() * load;
}

Eigen::VectorXcd l2_project_facet(const Discretization& disc, std::size_t f,
                                  const std::function<Complex(const Point&)>& fn, const QuadratureRule* rule) {
  const QuadratureRule own = rule ? QuadratureRule{} : analysis_rule(disc, RefDomain::segment);
  const QuadratureRule& r = rule ? *rule : own;
  const Mesh& mesh = disc.mesh();
  const double length = mesh.facet(f).length;
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(r.points);
  const auto n = mu.rows();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(n);
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double w = r.weights[q] * length;
    const auto col = mu.col(Eigen::Index(q));
    mass.noalias() += w * col * col.transpose();
    load += (w * fn(mesh.facet_point(f, r.points[q].x()))) * col.cast<Complex>();
  }
  return mass.ldlt().solve(Eigen::MatrixXd::Identity(n, n)).cast<Complex>() * load;
}

namespace {

/// Sum over elements of alpha ||u_h - u_hat||^2 + beta ||sigma_h.n - s sigma_hat||^2 on the boundary.
double jump_norm(const Discretization& disc, const Solution& sol, const ProblemData& data, const QuadratureRule& rule) {
  const Mesh& mesh = disc.mesh();
  std::vector<double> t;
  for (const Point& p : rule.points) t.push_back(p.x());
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t f = mesh.element_facets(e)[std::size_t(k)];
      const double sign = mesh.element_facet_signs(e)[std::size_t(k)];
      const Point n = mesh.outward_normal(e, k);
      const std::vector<Point> ref = disc.edge_reference_points(e, k, t);
      const Eigen::VectorXcd u = evaluate_scalar(disc, sol, e, ref);
      const Eigen::MatrixXcd s = evaluate_flux(disc, sol, e, ref);
      const Eigen::VectorXcd uh = evaluate_facet(disc, sol, f, FacetVariable::trace, t);
      const Eigen::VectorXcd sh = evaluate_facet(disc, sol, f, FacetVariable::flux, t);
      const double len = mesh.facet(f).length;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto iq = Eigen::Index(q);
        const Complex ju = u(iq) - uh(iq);
        const Complex js = s(0, iq) * n.x() + s(1, iq) * n.y() - sign * sh(iq);
        total += rule.weights[q] * len * (data.alpha * std::norm(ju) + data.beta * std::norm(js));
      }
    }
  }
  return total;
}

}  // namespace

LevelErrors compute_errors(const Discretization& disc, const Solution& sol, const ExactSolution& exact,
                           const ProblemData& data) {
  const Mesh& mesh = disc.mesh();
  const QuadratureRule vrule = analysis_rule(disc, RefDomain::triangle);
  const QuadratureRule frule = analysis_rule(disc, RefDomain::segment);

  LevelErrors out;
  out.n = mesh.cells_per_side();
  out.h = mesh.h_max();
  out.ndof_volume = disc.volume_dim();
  out.ndof_skeleton = disc.skeleton_dim();

  double eu = 0.0, es = 0.0, epu = 0.0, eproj = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementBasis& basis = disc.element_basis(e);
    const std::vector<Point> x = physical_points(basis.map(), vrule.points);
    const Eigen::VectorXcd uh = evaluate_scalar(disc, sol, e, vrule.points);
    const Eigen::MatrixXcd sh = evaluate_flux(disc, sol, e, vrule.points);
    const Eigen::VectorXcd pi_u =
        basis.scalar_values(vrule.points).transpose().cast<Complex>() * l2_project_volume(disc, e, exact.u);
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const double w = vrule.weights[q] * std::abs(basis.map().det);
      const Complex u = exact.u(x[q]);
      const Vector2c s = exact.sigma(x[q]);
      eu += w * std::norm(u - uh(iq));
      es += w * (std::norm(s.x() - sh(0, iq)) + std::norm(s.y() - sh(1, iq)));
      epu += w * std::norm(pi_u(iq) - uh(iq));
      eproj += w * std::norm(u - pi_u(iq));
    }
  }

  std::vector<double> t;
  for (const Point& p : frule.points) t.push_back(p.x());
  double et = 0.0, ef = 0.0;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    const Eigen::VectorXcd uh = evaluate_facet(disc, sol, f, FacetVariable::trace, t);
    const Eigen::VectorXcd sh = evaluate_facet(disc, sol, f, FacetVariable::flux, t);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const Point x = mesh.facet_point(f, t[q]);
      const double w = frule.weights[q] * facet.length;
      const Vector2c s = exact.sigma(x);
      et += w * std::norm(exact.u(x) - uh(iq));
      ef += w * std::norm(s.x() * facet.normal.x() + s.y() * facet.normal.y() - sh(iq));
    }
  }

  out.u = std::sqrt(eu);
  out.sigma = std::sqrt(es);
  out.projected_u = std::sqrt(epu);
  out.projection_u = std::sqrt(eproj);
  out.trace = std::sqrt(et);
  out.flux_trace = std::sqrt(ef);
  out.jump = jump_norm(disc, sol, data, frule);
  return out;
}

EnergyTerms energy_terms(const Discretization& disc, const Solution& sol, const ProblemData& data) {
  const Mesh& mesh = disc.mesh();
  const QuadratureRule& vrule = disc.volume_rule();
  const QuadratureRule& frule = disc.facet_rule();

  EnergyTerms out;
  out.jump = jump_norm(disc, sol, data, frule);

  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementBasis& basis = disc.element_basis(e);
    const Eigen::VectorXcd uh = evaluate_scalar(disc, sol, e, vrule.points);
    const Eigen::MatrixXcd sh = evaluate_flux(disc, sol, e, vrule.points);
    for (std::size_t q = 0; q < vrule.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const double w = vrule.weights[q] * std::abs(basis.map().det);
      out.flux_volume += w * (std::norm(sh(0, iq)) + std::norm(sh(1, iq)));
      out.scalar_volume += w * data.c(basis.map().map(vrule.points[q])) * std::norm(uh(iq));
    }
  }
  out.flux_volume *= data.kappa;
  out.scalar_volume *= data.kappa;

  const std::vector<double> t = disc.facet_parameters(frule);
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    if (!facet.boundary) continue;
    const Eigen::VectorXcd uh = evaluate_facet(disc, sol, f, FacetVariable::trace, t);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const double w = frule.weights[q] * facet.length;
      const Complex g = data.g(mesh.facet_point(f, t[q]), facet.normal);
      out.trace_boundary += w * std::norm(uh(iq));
      out.g_trace += w * g * std::conj(uh(iq));
      out.g_norm2 += w * std::norm(g);
    }
  }
  return out;
}

IdentityResiduals check_energy_identities(const Discretization& disc, const Solution& sol, const ProblemData& data) {
  const EnergyTerms terms = energy_terms(disc, sol, data);
  const auto residual = [&](double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), terms.g_norm2});
    const double diff = std::abs(lhs - rhs);
    return scale > 0.0 ? diff / scale : diff;
  };
  IdentityResiduals out;
  out.real_part = residual(terms.jump + terms.trace_boundary, terms.g_trace.real());
  out.imag_part = residual(terms.flux_volume - terms.scalar_volume, -terms.g_trace.imag());
  return out;
}

StabilityCheck check_stability_bounds(const Discretization& disc, const Solution& sol, const ProblemData& data) {
  const EnergyTerms terms = energy_terms(disc, sol, data);
  const double tol = 1e-8 * terms.g_norm2;
  StabilityCheck out;
  out.boundary_slack = terms.g_norm2 - (terms.jump + terms.trace_boundary);
  out.volume_slack = terms.scalar_volume + terms.g_norm2 - terms.flux_volume;
  out.boundary_bound = out.boundary_slack >= -tol;
  out.volume_bound = out.volume_slack >= -tol;
  return out;
}

double FacetEliminationResiduals::max() const {
  return std::max({interior_flux, interior_trace, boundary_flux, boundary_trace});
}

FacetEliminationResiduals check_facet_elimination(const Discretization& disc, const Solution& sol,
                                                  const ProblemData& data) {
  const Mesh& mesh = disc.mesh();
  const QuadratureRule& rule = disc.facet_rule();
  const std::vector<double> t = disc.facet_parameters(rule);
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(rule.points);

  auto local_edge = [&](std::size_t e, std::size_t f) {
    const auto& ef = mesh.element_facets(e);
    return int(std::find(ef.begin(), ef.end(), f) - ef.begin());
  };

  double r_if = 0, n_if = 0, r_it = 0, n_it = 0, r_bf = 0, n_bf = 0, r_bt = 0, n_bt = 0;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    const Point& n = facet.normal;
    const Eigen::VectorXcd sh = evaluate_facet(disc, sol, f, FacetVariable::flux, t);
    const Eigen::VectorXcd uh = evaluate_facet(disc, sol, f, FacetVariable::trace, t);

    const std::size_t e0 = *facet.owners[0];
    const std::vector<Point> ref0 = disc.edge_reference_points(e0, local_edge(e0, f), t);
    const Eigen::VectorXcd u0 = evaluate_scalar(disc, sol, e0, ref0);
    const Eigen::MatrixXcd s0 = evaluate_flux(disc, sol, e0, ref0);
    const Eigen::VectorXcd s0n = (n.x() * s0.row(0) + n.y() * s0.row(1)).transpose();

    Eigen::VectorXcd flux_target, trace_target;
    if (!facet.boundary) {
      const std::size_t e1 = *facet.owners[1];
      const std::vector<Point> ref1 = disc.edge_reference_points(e1, local_edge(e1, f), t);
      const Eigen::VectorXcd u1 = evaluate_scalar(disc, sol, e1, ref1);
      const Eigen::MatrixXcd s1 = evaluate_flux(disc, sol, e1, ref1);
      const Eigen::VectorXcd s1n = (n.x() * s1.row(0) + n.y() * s1.row(1)).transpose();
      flux_target = 0.5 * (s0n + s1n);
      // sigma_+.n_+ + sigma_-.n_- with n_- = -n
      trace_target = 0.5 * (u0 + u1) - (s0n - s1n) / (2.0 * data.alpha);
    } else {
      const Eigen::VectorXcd pig_coeff = l2_project_facet(
          disc, f, [&](const Point& x) { return data.g(x, n); }, &rule);
      const Eigen::VectorXcd pig = mu.transpose().cast<Complex>() * pig_coeff;
      flux_target = s0n;
      trace_target = (pig - s0n + data.alpha * u0) / (1.0 + data.alpha);
    }

    double rf = 0, nf = 0, rt = 0, nt = 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const double w = rule.weights[q] * facet.length;
      rf += w * std::norm(sh(iq) - flux_target(iq));
      nf += w * std::norm(sh(iq));
      rt += w * std::norm(uh(iq) - trace_target(iq));
      nt += w * std::norm(uh(iq));
    }
    if (facet.boundary) {
      r_bf += rf, n_bf += nf, r_bt += rt, n_bt += nt;
    } else {
      r_if += rf, n_if += nf, r_it += rt, n_it += nt;
    }
  }
  return {relative(r_if, n_if), relative(r_it, n_it), relative(r_bf, n_bf), relative(r_bt, n_bt)};
}

RateFit fit_convergence_rate(const std::vector<std::pair<double, double>>& levels) {
  RateFit fit;
  std::vector<std::pair<double, double>> usable;
  for (const auto& [h, err] : levels) {
    if (!(err > 0.0) || !std::isfinite(err) || !(h > 0.0)) {
      fit.warnings.push_back("level with h=" + std::to_string(h) + " excluded: non-positive error");
      continue;
    }
    usable.emplace_back(h, err);
  }
  std::sort(usable.begin(), usable.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i + 1 < usable.size(); ++i)
    fit.pairwise.push_back(std::log(usable[i].second / usable[i + 1].second) /
                           std::log(usable[i].first / usable[i + 1].first));
  if (usable.size() < 3) {
    fit.warnings.push_back("fewer than three usable levels; no slope fitted");
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = usable.size() - 3; i < usable.size(); ++i) {
    const double lx = std::log(usable[i].first), ly = std::log(usable[i].second);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  fit.slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  return fit;
}

}  // namespace hdg
