#pragma once

#include "hdg/discretization.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace hdg {

using Complex = std::complex<double>;

/// Coefficients and excitation of the mixed Helmholtz problem
///   j kappa sigma - grad u = 0,  -div sigma + j kappa c u = 0,  sigma.n + u = g.
struct ProblemData {
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  /// Material coefficient c(x); empty means c = 1.
  std::function<double(const Point&)> coefficient;
  /// Boundary excitation g(x) given the outward normal at x; empty means g = 0.
  std::function<Complex(const Point&, const Point&)> excitation;
  /// Fault injection for the verification suite: assemble -beta in place of beta.
  bool flip_beta_sign = false;

  [[nodiscard]] double c(const Point& x) const { return coefficient ? coefficient(x) : 1.0; }
  [[nodiscard]] Complex g(const Point& x, const Point& n) const { return excitation ? excitation(x, n) : Complex(0.0); }
  /// Throws std::invalid_argument if kappa, alpha or beta are not positive.
  void validate() const;
};

/// Local blocks of the HDG sesquilinear form on one element. Entry (i, j) is
/// B(trial_j, test_i); interior rows/cols are [sigma | u], facet ones follow
/// Discretization::local_facet_dof.
struct ElementBlocks {
  Eigen::MatrixXcd a_ii, a_if, a_fi, a_ff;
  Eigen::VectorXcd rhs_i, rhs_f;
};

ElementBlocks assemble_element(const Discretization& disc, std::size_t e, const ProblemData& data);
std::vector<ElementBlocks> assemble_all(const Discretization& disc, const ProblemData& data);

/// Global skeleton right-hand side: -(g, v_hat) on boundary facets, trace rows only.
Eigen::VectorXcd assemble_rhs(const Discretization& disc, const ProblemData& data);

}  // namespace hdg
