#include "hdg/discretization.hpp"

#include <stdexcept>

namespace hdg {

Discretization::Discretization(Mesh mesh, int p, int quadrature_degree)
    : mesh_(std::make_shared<const Mesh>(std::move(mesh))),
      degree_(p),
      scalar_(std::make_shared<const ScalarBasis>(build_scalar_basis(RefDomain::triangle, p))),
      facet_(std::make_shared<const ScalarBasis>(build_scalar_basis(RefDomain::segment, p))),
      rt_(std::make_shared<const RTBasis>(build_rt_basis(p))) {
  const int q = quadrature_degree < 0 ? 2 * p + 3 : quadrature_degree;
  if (q < 2 * p + 3)
    throw std::invalid_argument("Discretization: quadrature exactness must be at least 2p+3");
  volume_rule_ = make_quadrature(RefDomain::triangle, q);
  facet_rule_ = make_quadrature(RefDomain::segment, q);
  element_bases_.reserve(mesh_->num_elements());
  for (std::size_t e = 0; e < mesh_->num_elements(); ++e) {
    const AffineMap map = mesh_->element_map(e);
    if (!(map.det > 0.0)) throw std::runtime_error("Discretization: element with non-positive Jacobian");
    element_bases_.emplace_back(map, *scalar_, *rt_);
  }
}

std::vector<Eigen::Index> Discretization::element_skeleton_dofs(std::size_t e) const {
  std::vector<Eigen::Index> dofs;
  dofs.reserve(local_facet_dim());
  const auto& facets = mesh_->element_facets(e);
  for (int k = 0; k < 3; ++k)
    for (auto var : {FacetVariable::flux, FacetVariable::trace})
      for (std::size_t i = 0; i < facet_dim(); ++i)
        dofs.push_back(Eigen::Index(skeleton_dof(facets[std::size_t(k)], var, i)));
  return dofs;
}

std::vector<Point> Discretization::edge_reference_points(std::size_t e, int k, const std::vector<double>& t) const {
  const auto& tri = mesh_->element(e);
  const Facet& facet = mesh_->facet(mesh_->element_facets(e)[std::size_t(k)]);
  int first = -1, second = -1;
  for (int i = 0; i < 3; ++i) {
    if (tri[std::size_t(i)] == facet.vertices[0]) first = i;
    if (tri[std::size_t(i)] == facet.vertices[1]) second = i;
  }
  const Point a = reference_vertex(first), b = reference_vertex(second);
  std::vector<Point> points;
  points.reserve(t.size());
  for (double s : t) points.push_back((1.0 - s) * a + s * b);
  return points;
}

std::vector<double> Discretization::facet_parameters(const QuadratureRule& rule) const {
  std::vector<double> t;
  t.reserve(rule.size());
  for (const Point& pt : rule.points) t.push_back(pt.x());
  return t;
}

}  // namespace hdg
