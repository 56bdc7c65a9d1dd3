#include "hdg/assembly.hpp"

#include <stdexcept>

namespace hdg {

void ProblemData::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("ProblemData: kappa must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("ProblemData: alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("ProblemData: beta must be positive");
}

ElementBlocks assemble_element(const Discretization& disc, std::size_t e, const ProblemData& data) {
  const Mesh& mesh = disc.mesh();
  const ElementBasis& basis = disc.element_basis(e);
  const auto nf = Eigen::Index(disc.flux_dim());
  const auto ns = Eigen::Index(disc.scalar_dim());
  const auto np = Eigen::Index(disc.facet_dim());
  const auto ni = nf + ns;
  const auto nl = Eigen::Index(disc.local_facet_dim());
  const Complex jk(0.0, data.kappa);
  const double alpha = data.alpha;
  const double beta = data.flip_beta_sign ? -data.beta : data.beta;

  ElementBlocks b;
  b.a_ii = Eigen::MatrixXcd::Zero(ni, ni);
  b.a_if = Eigen::MatrixXcd::Zero(ni, nl);
  b.a_fi = Eigen::MatrixXcd::Zero(nl, ni);
  b.a_ff = Eigen::MatrixXcd::Zero(nl, nl);
  b.rhs_i = Eigen::VectorXcd::Zero(ni);
  b.rhs_f = Eigen::VectorXcd::Zero(nl);

  // Volume terms: j kappa (sigma, tau) + (u, div tau) + (div sigma, v) - j kappa (c u, v).
  const QuadratureRule& vrule = disc.volume_rule();
  const VectorValues flux = basis.flux_values(vrule.points);
  const Eigen::MatrixXd scal = basis.scalar_values(vrule.points);
  Eigen::VectorXd w(Eigen::Index(vrule.size())), wc(Eigen::Index(vrule.size()));
  for (std::size_t q = 0; q < vrule.size(); ++q) {
    w(Eigen::Index(q)) = vrule.weights[q] * std::abs(basis.map().det);
    wc(Eigen::Index(q)) = w(Eigen::Index(q)) * data.c(basis.map().map(vrule.points[q]));
  }
  const auto wd = w.asDiagonal();
  const Eigen::MatrixXd mass_flux = flux.x * wd * flux.x.transpose() + flux.y * wd * flux.y.transpose();
  const Eigen::MatrixXd div_scal = flux.div * wd * scal.transpose();
  b.a_ii.topLeftCorner(nf, nf) += jk * mass_flux;
  b.a_ii.topRightCorner(nf, ns) += div_scal;
  b.a_ii.bottomLeftCorner(ns, nf) += div_scal.transpose();
  b.a_ii.bottomRightCorner(ns, ns) -= jk * (scal * wc.asDiagonal() * scal.transpose());

  // Element boundary terms.
  const QuadratureRule& frule = disc.facet_rule();
  const std::vector<double> t = disc.facet_parameters(frule);
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(frule.points);
  for (int k = 0; k < 3; ++k) {
    const std::size_t f = mesh.element_facets(e)[std::size_t(k)];
    const double sign = mesh.element_facet_signs(e)[std::size_t(k)];
    const FacetGeometry geo = mesh.facet_geometry(f);
    const Point n = mesh.outward_normal(e, k);
    const std::vector<Point> ref = disc.edge_reference_points(e, k, t);
    const VectorValues fv = basis.flux_values(ref);
    const Eigen::MatrixXd flux_n = n.x() * fv.x + n.y() * fv.y;
    const Eigen::MatrixXd scal_e = basis.scalar_values(ref);
    Eigen::VectorXd we(Eigen::Index(frule.size()));
    for (std::size_t q = 0; q < frule.size(); ++q) we(Eigen::Index(q)) = frule.weights[q] * geo.length;
    const auto wed = we.asDiagonal();

    const Eigen::MatrixXd nn = flux_n * wed * flux_n.transpose();
    const Eigen::MatrixXd n_mu = flux_n * wed * mu.transpose();
    const Eigen::MatrixXd s_mu = scal_e * wed * mu.transpose();
    const Eigen::MatrixXd mu_mu = mu * wed * mu.transpose();
    const Eigen::MatrixXd ss = scal_e * wed * scal_e.transpose();

    const auto fs = Eigen::Index(disc.local_facet_dof(k, FacetVariable::flux, 0));
    const auto ft = Eigen::Index(disc.local_facet_dof(k, FacetVariable::trace, 0));

    // - (u_hat, tau.n) - (sigma.n, v_hat)
    b.a_if.block(0, ft, nf, np) -= n_mu;
    b.a_fi.block(ft, 0, np, nf) -= n_mu.transpose();
    // - alpha (u - u_hat, v - v_hat)
    b.a_ii.bottomRightCorner(ns, ns) -= alpha * ss;
    b.a_if.block(nf, ft, ns, np) += alpha * s_mu;
    b.a_fi.block(ft, nf, np, ns) += alpha * s_mu.transpose();
    b.a_ff.block(ft, ft, np, np) -= alpha * mu_mu;
    // + beta (sigma.n - s sigma_hat, tau.n - s tau_hat)
    b.a_ii.topLeftCorner(nf, nf) += beta * nn;
    b.a_if.block(0, fs, nf, np) -= beta * sign * n_mu;
    b.a_fi.block(fs, 0, np, nf) -= beta * sign * n_mu.transpose();
    b.a_ff.block(fs, fs, np, np) += beta * mu_mu;

    if (mesh.facet(f).boundary) {
      // - (u_hat, v_hat) on the domain boundary and the excitation -(g, v_hat)
      b.a_ff.block(ft, ft, np, np) -= mu_mu;
      Eigen::VectorXcd gw(Eigen::Index(frule.size()));
      for (std::size_t q = 0; q < frule.size(); ++q)
        gw(Eigen::Index(q)) = we(Eigen::Index(q)) * data.g(mesh.facet_point(f, t[q]), n);
      b.rhs_f.segment(ft, np) -= mu.cast<Complex>() * gw;
    }
  }
  return b;
}

std::vector<ElementBlocks> assemble_all(const Discretization& disc, const ProblemData& data) {
  data.validate();
  std::vector<ElementBlocks> blocks;
  blocks.reserve(disc.mesh().num_elements());
  for (std::size_t e = 0; e < disc.mesh().num_elements(); ++e) blocks.push_back(assemble_element(disc, e, data));
  return blocks;
}

Eigen::VectorXcd assemble_rhs(const Discretization& disc, const ProblemData& data) {
  const Mesh& mesh = disc.mesh();
  const QuadratureRule& rule = disc.facet_rule();
  const std::vector<double> t = disc.facet_parameters(rule);
  const Eigen::MatrixXcd mu = disc.facet_basis().evaluate(rule.points).cast<Complex>();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(Eigen::Index(disc.skeleton_dim()));
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    const Facet& facet = mesh.facet(f);
    if (!facet.boundary) continue;
    Eigen::VectorXcd gw(Eigen::Index(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q)
      gw(Eigen::Index(q)) = rule.weights[q] * facet.length * data.g(mesh.facet_point(f, t[q]), facet.normal);
    rhs.segment(Eigen::Index(disc.skeleton_dof(f, FacetVariable::trace, 0)), Eigen::Index(disc.facet_dim())) -= mu * gw;
  }
  return rhs;
}

}  // namespace hdg
