#pragma once

#include "hdg/basis.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

#include <memory>
#include <vector>

namespace hdg {

/// Which facet unknown a skeleton degree of freedom belongs to.
enum class FacetVariable { flux = 0, trace = 1 };

/// Degree-p HDG spaces on a mesh: RT^p x P^p per element, P^p x P^p per facet.
///
/// Per-element unknown layout: [sigma (RT) | u (P^p)] interior, then for each local edge k
/// [sigma_hat_n (p+1) | u_hat (p+1)]. Skeleton layout: facet f owns the
/// 2(p+1) entries starting at f * 2(p+1), flux variable first.
class Discretization {
 public:
  /// `quadrature_degree` < 0 selects 2p+3.
  Discretization(Mesh mesh, int p, int quadrature_degree = -1);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const ScalarBasis& scalar_basis() const { return *scalar_; }
  [[nodiscard]] const ScalarBasis& facet_basis() const { return *facet_; }
  [[nodiscard]] const RTBasis& rt_basis() const { return *rt_; }
  [[nodiscard]] const ElementBasis& element_basis(std::size_t e) const { return element_bases_.at(e); }
  [[nodiscard]] const QuadratureRule& volume_rule() const { return volume_rule_; }
  [[nodiscard]] const QuadratureRule& facet_rule() const { return facet_rule_; }

  [[nodiscard]] std::size_t flux_dim() const { return rt_->dimension(); }
  [[nodiscard]] std::size_t scalar_dim() const { return scalar_->dimension(); }
  [[nodiscard]] std::size_t facet_dim() const { return facet_->dimension(); }
  [[nodiscard]] std::size_t interior_dim() const { return flux_dim() + scalar_dim(); }
  [[nodiscard]] std::size_t local_facet_dim() const { return 6 * facet_dim(); }
  [[nodiscard]] std::size_t skeleton_dim() const { return 2 * facet_dim() * mesh_->num_facets(); }
  [[nodiscard]] std::size_t volume_dim() const { return interior_dim() * mesh_->num_elements(); }

  [[nodiscard]] std::size_t skeleton_dof(std::size_t facet, FacetVariable var, std::size_t i) const {
    return (2 * facet + std::size_t(var)) * facet_dim() + i;
  }
  [[nodiscard]] std::size_t local_facet_dof(int edge, FacetVariable var, std::size_t i) const {
    return (2 * std::size_t(edge) + std::size_t(var)) * facet_dim() + i;
  }
  /// Global skeleton indices of an element's facet unknowns in local layout order.
  [[nodiscard]] std::vector<Eigen::Index> element_skeleton_dofs(std::size_t e) const;

  /// Reference coordinates of points on local edge k at facet parameters t (along the
  /// facet's stored orientation, so both neighbours see the same physical point).
  [[nodiscard]] std::vector<Point> edge_reference_points(std::size_t e, int k, const std::vector<double>& t) const;
  /// Segment quadrature parameters.
  [[nodiscard]] std::vector<double> facet_parameters(const QuadratureRule& rule) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::shared_ptr<const ScalarBasis> scalar_;
  std::shared_ptr<const ScalarBasis> facet_;
  std::shared_ptr<const RTBasis> rt_;
  std::vector<ElementBasis> element_bases_;
  QuadratureRule volume_rule_;
  QuadratureRule facet_rule_;
};

}  // namespace hdg
