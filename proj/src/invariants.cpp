#include "hdg/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace hdg {

namespace {

double factorial(int n) { return std::tgamma(double(n) + 1.0); }

/// Largest discrete L2 residual of projecting the rows of `values` (sampled at `rule`)
/// onto the span of the rows of `basis_values`.
double projection_residual(const Eigen::MatrixXd& values, const Eigen::MatrixXd& basis_values,
                           const QuadratureRule& rule) {
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.size()));
  const Eigen::MatrixXd gram = basis_values * w.asDiagonal() * basis_values.transpose();
  const Eigen::MatrixXd load = basis_values * w.asDiagonal() * values.transpose();
  const Eigen::MatrixXd coeff = gram.ldlt().solve(load);
  const Eigen::MatrixXd residual = values - coeff.transpose() * basis_values;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < residual.rows(); ++i)
    worst = std::max(worst, std::sqrt((residual.row(i).array().square() * w.transpose().array()).sum()));
  return worst;
}

}  // namespace

double quadrature_exactness_error(RefDomain domain, int degree) {
  const QuadratureRule rule = make_quadrature(domain, degree);
  double worst = 0.0;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; b <= (domain == RefDomain::segment ? 0 : degree - a); ++b) {
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        sum += rule.weights[q] * std::pow(rule.points[q].x(), a) * std::pow(rule.points[q].y(), b);
      const double exact = domain == RefDomain::segment ? 1.0 / (a + 1.0)
                                                        : factorial(a) * factorial(b) / factorial(a + b + 2);
      worst = std::max(worst, std::abs(sum - exact));
    }
  }
  return worst;
}

double scalar_orthonormality_error(const ScalarBasis& basis) {
  const QuadratureRule rule = make_quadrature(basis.domain, 2 * basis.degree + 2);
  const Eigen::MatrixXd v = basis.evaluate(rule.points);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.size()));
  const Eigen::MatrixXd m = v * w.asDiagonal() * v.transpose();
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double rt_orthonormality_error(const RTBasis& basis) {
  const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * basis.degree + 4);
  const VectorValues v = basis.evaluate(rule.points);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.size()));
  const Eigen::MatrixXd m = v.x * w.asDiagonal() * v.x.transpose() + v.y * w.asDiagonal() * v.y.transpose();
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double rt_divergence_residual(const RTBasis& basis) {
  const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * basis.degree + 6);
  const VectorValues v = basis.evaluate(rule.points);
  const ScalarBasis pp = build_scalar_basis(RefDomain::triangle, basis.degree);
  return projection_residual(v.div, pp.evaluate(rule.points), rule);
}

double rt_normal_trace_residual(const RTBasis& basis) {
  const QuadratureRule rule = make_quadrature(RefDomain::segment, 2 * basis.degree + 6);
  std::vector<double> t;
  for (const Point& p : rule.points) t.push_back(p.x());
  const ScalarBasis pp = build_scalar_basis(RefDomain::segment, basis.degree);
  const Eigen::MatrixXd mu = pp.evaluate(rule.points);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, projection_residual(basis.normal_trace(k, t), mu, rule));
  return worst;
}

MeshCheck check_mesh(const Mesh& mesh) {
  MeshCheck out;
  const std::size_t n = mesh.cells_per_side();
  out.counts = mesh.num_elements() == 2 * n * n && mesh.num_facets() == 3 * n * n + 2 * n &&
               mesh.num_boundary_facets() == 4 * n;

  out.owners = true;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    if (!facet.owners[0] || facet.boundary == facet.owners[1].has_value()) out.owners = false;
  }
  std::vector<int> sign_product(mesh.num_facets(), 1);
  std::vector<int> seen(mesh.num_facets(), 0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t f = mesh.element_facets(e)[std::size_t(k)];
      sign_product[f] *= mesh.element_facet_signs(e)[std::size_t(k)];
      ++seen[f];
    }
  }
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const bool interior = !mesh.facet(f).boundary;
    if (seen[f] != (interior ? 2 : 1) || (interior && sign_product[f] != -1)) out.owners = false;
  }

  out.orientation = true;
  double area = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    if (!(mesh.element_map(e).det > 0.0)) out.orientation = false;
    area += mesh.element_area(e);
  }
  for (const Facet& f : mesh.facets())
    if (std::abs(f.normal.norm() - 1.0) > 1e-14) out.orientation = false;
  const Point span = mesh.upper() - mesh.lower();
  out.area_error = std::abs(area - span.x() * span.y());
  return out;
}

}  // namespace hdg
