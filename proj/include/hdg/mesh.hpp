#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hdg {

using Point = Eigen::Vector2d;

/// Edge of the triangulation. Endpoints are stored with `vertices[0] < vertices[1]`;
/// facet polynomials are parameterized from `vertices[0]` to `vertices[1]`.
struct Facet {
  std::array<std::size_t, 2> vertices{};
  /// owners[0] is the lower element index; owners[1] is empty on the boundary.
  std::array<std::optional<std::size_t>, 2> owners{};
  /// Outward normal of owners[0].
  Point normal = Point::Zero();
  double length = 0.0;
  bool boundary = false;
};

struct FacetGeometry {
  Point normal;
  double length;
  Point midpoint;
};

/// Affine map x = origin + jacobian * xi from the reference triangle (0,0),(1,0),(0,1).
struct AffineMap {
  Point origin;
  Eigen::Matrix2d jacobian;
  double det = 0.0;

  [[nodiscard]] Point map(const Point& xi) const { return origin + jacobian * xi; }
};

class Mesh {
 public:
  [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t num_elements() const { return elements_.size(); }
  [[nodiscard]] std::size_t num_facets() const { return facets_.size(); }
  [[nodiscard]] std::size_t num_boundary_facets() const;

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const std::array<std::size_t, 3>& element(std::size_t e) const { return elements_.at(e); }
  [[nodiscard]] const Facet& facet(std::size_t f) const { return facets_.at(f); }
  [[nodiscard]] const std::vector<Facet>& facets() const { return facets_; }

  /// Local edge k of an element is opposite its local vertex k.
  [[nodiscard]] const std::array<std::size_t, 3>& element_facets(std::size_t e) const { return element_facets_.at(e); }
  /// +1 where the element's outward normal equals the stored facet normal, -1 otherwise.
  [[nodiscard]] const std::array<int, 3>& element_facet_signs(std::size_t e) const { return element_facet_signs_.at(e); }
  /// Facet indices incident to each vertex, ascending.
  [[nodiscard]] const std::vector<std::size_t>& vertex_facets(std::size_t v) const { return vertex_facets_.at(v); }

  [[nodiscard]] AffineMap element_map(std::size_t e) const;
  [[nodiscard]] double element_area(std::size_t e) const;
  [[nodiscard]] FacetGeometry facet_geometry(std::size_t f) const;
  /// Point on facet f at parameter t in [0,1] along its stored orientation.
  [[nodiscard]] Point facet_point(std::size_t f, double t) const;
  /// Outward unit normal of local edge k of element e.
  [[nodiscard]] Point outward_normal(std::size_t e, int k) const;

  [[nodiscard]] double h_max() const { return h_max_; }
  [[nodiscard]] std::size_t cells_per_side() const { return cells_; }
  [[nodiscard]] const Point& lower() const { return lower_; }
  [[nodiscard]] const Point& upper() const { return upper_; }

  /// Element containing x and its reference coordinates, if x lies in the domain.
  [[nodiscard]] std::optional<std::pair<std::size_t, Point>> locate(const Point& x) const;

  void dump(std::ostream& os) const;

  friend Mesh build_structured_mesh(std::size_t n, const Point& lower, const Point& upper);

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<std::size_t, 3>> elements_;
  std::vector<Facet> facets_;
  std::vector<std::array<std::size_t, 3>> element_facets_;
  std::vector<std::array<int, 3>> element_facet_signs_;
  std::vector<std::vector<std::size_t>> vertex_facets_;
  double h_max_ = 0.0;
  std::size_t cells_ = 0;
  Point lower_ = Point::Zero();
  Point upper_ = Point::Ones();
};

/// Crisscross triangulation of the rectangle [lower, upper] with n x n cells,
/// each split along its top-left to bottom-right diagonal.
/// Throws std::invalid_argument for n == 0.
Mesh build_structured_mesh(std::size_t n, const Point& lower = Point(0.0, 0.0), const Point& upper = Point(1.0, 1.0));

FacetGeometry facet_geometry(const Mesh& mesh, std::size_t facet_id);

}  // namespace hdg
