#pragma once

#include "hdg/assembly.hpp"
#include "hdg/discretization.hpp"
#include "hdg/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hdg {

using Vector2c = Eigen::Vector2cd;

/// Exact solution of the homogeneous problem (c = 1) with sigma = grad u / (j kappa)
/// and impedance data g = sigma.n + u.
struct ExactSolution {
  double kappa = 1.0;
  std::function<Complex(const Point&)> u;
  std::function<Vector2c(const Point&)> grad_u;

  [[nodiscard]] Vector2c sigma(const Point& x) const { return grad_u(x) / Complex(0.0, kappa); }
  [[nodiscard]] Complex g(const Point& x, const Point& n) const {
    const Vector2c s = sigma(x);
    return s.x() * n.x() + s.y() * n.y() + u(x);
  }
  /// ProblemData with this solution's impedance data and alpha = beta = 1.
  [[nodiscard]] ProblemData problem() const;
};

/// u(x, y) = exp(j kappa (x cos theta + y sin theta)).
ExactSolution plane_wave(double kappa, double theta);

// ---- evaluation of discrete solutions ----

Eigen::VectorXcd evaluate_scalar(const Discretization& disc, const Solution& sol, std::size_t e,
                                 const std::vector<Point>& ref_points);
/// Rows 0/1 are the x/y components.
Eigen::MatrixXcd evaluate_flux(const Discretization& disc, const Solution& sol, std::size_t e,
                               const std::vector<Point>& ref_points);
Eigen::VectorXcd evaluate_facet(const Discretization& disc, const Solution& sol, std::size_t f, FacetVariable var,
                                const std::vector<double>& t);

// ---- L2 projections ----

/// Rule used for projections and error norms: exactness 2p+7.
QuadratureRule analysis_rule(const Discretization& disc, RefDomain domain);

Eigen::VectorXcd l2_project_volume(const Discretization& disc, std::size_t e,
                                   const std::function<Complex(const Point&)>& f);
Eigen::VectorXcd l2_project_flux(const Discretization& disc, std::size_t e,
                                 const std::function<Vector2c(const Point&)>& f);
/// `rule` defaults to analysis_rule(segment).
Eigen::VectorXcd l2_project_facet(const Discretization& disc, std::size_t f,
                                  const std::function<Complex(const Point&)>& fn,
                                  const QuadratureRule* rule = nullptr);

// ---- error reports ----

struct LevelErrors {
  std::size_t n = 0;
  double h = 0.0;
  std::size_t ndof_volume = 0;
  std::size_t ndof_skeleton = 0;
  double u = 0.0;             // ||u - u_h||
  double sigma = 0.0;         // ||sigma - sigma_h||
  double projected_u = 0.0;   // ||Pi u - u_h||
  double projection_u = 0.0;  // ||u - Pi u||
  double trace = 0.0;         // aggregated facet L2 of u_hat_h - u
  double flux_trace = 0.0;    // aggregated facet L2 of sigma_hat_h - sigma.n
  double jump = 0.0;          // sum alpha ||[u_h]||^2 + beta ||[[sigma_h]]||^2 over element boundaries
};

LevelErrors compute_errors(const Discretization& disc, const Solution& sol, const ExactSolution& exact,
                           const ProblemData& data);

/// Squared jump terms and boundary quantities entering the energy identities.
struct EnergyTerms {
  double jump = 0.0;              // sum alpha ||u_h - u_hat||^2 + beta ||sigma_h.n - sigma_hat||^2
  double trace_boundary = 0.0;    // ||u_hat||^2 on the boundary
  double flux_volume = 0.0;       // kappa ||sigma_h||^2
  double scalar_volume = 0.0;     // kappa (c u_h, u_h)
  Complex g_trace{0.0};           // (g, u_hat) on the boundary
  double g_norm2 = 0.0;           // ||g||^2 on the boundary
};

/// All terms integrated with the assembly rules, so the identities hold to round-off.
EnergyTerms energy_terms(const Discretization& disc, const Solution& sol, const ProblemData& data);

struct IdentityResiduals {
  double real_part = 0.0;
  double imag_part = 0.0;
};

/// |LHS - RHS| / max(|LHS|, |RHS|, ||g||^2) for
///   jump + ||u_hat||^2 = Re (g, u_hat)   and   kappa ||sigma_h||^2 - kappa (c u_h, u_h) = -Im (g, u_hat).
IdentityResiduals check_energy_identities(const Discretization& disc, const Solution& sol, const ProblemData& data);

struct StabilityCheck {
  bool boundary_bound = false;
  bool volume_bound = false;
  double boundary_slack = 0.0;  // ||g||^2 - (jump + ||u_hat||^2)
  double volume_slack = 0.0;    // kappa ||u_h||^2 + ||g||^2 - kappa ||sigma_h||^2
};

/// Discrete stability bounds with slack tolerance 1e-8 ||g||^2. Meaningful for c = 1.
StabilityCheck check_stability_bounds(const Discretization& disc, const Solution& sol, const ProblemData& data);

struct FacetEliminationResiduals {
  double interior_flux = 0.0;
  double interior_trace = 0.0;
  double boundary_flux = 0.0;
  double boundary_trace = 0.0;

  [[nodiscard]] double max() const;
};

/// Relative facet-L2 residuals of the explicit facet formulas:
///   interior: sigma_hat = {sigma_h}.n,  u_hat = {u_h} - [sigma_h]_n / (2 alpha)
///   boundary: sigma_hat = sigma_h.n,    u_hat = (Pi_F g - sigma_h.n + alpha u_h) / (1 + alpha)
FacetEliminationResiduals check_facet_elimination(const Discretization& disc, const Solution& sol,
                                                  const ProblemData& data);

struct RateFit {
  std::optional<double> slope;   // least squares over the finest three usable levels
  std::vector<double> pairwise;  // log(e_i / e_{i+1}) / log(h_i / h_{i+1}) between consecutive usable levels
  std::vector<std::string> warnings;
};

/// Levels with non-positive error are excluded with a warning.
RateFit fit_convergence_rate(const std::vector<std::pair<double, double>>& levels);

}  // namespace hdg
