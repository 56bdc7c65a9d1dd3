#include "hdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hdg {

namespace {

Point edge_outward_normal(const Point& a, const Point& b) {
  // Counterclockwise element: the outward normal of edge a->b is the tangent rotated clockwise.
  const Point d = b - a;
  return Point(d.y(), -d.x()) / d.norm();
}

}  // namespace

Mesh build_structured_mesh(std::size_t n, const Point& lower, const Point& upper) {
  if (n == 0) throw std::invalid_argument("build_structured_mesh: N must be positive");
  if (!(upper.x() > lower.x() && upper.y() > lower.y()))
    throw std::invalid_argument("build_structured_mesh: empty domain");

  Mesh mesh;
  mesh.cells_ = n;
  mesh.lower_ = lower;
  mesh.upper_ = upper;

  const std::size_t nv = n + 1;
  const Point step((upper.x() - lower.x()) / double(n), (upper.y() - lower.y()) / double(n));
  mesh.vertices_.reserve(nv * nv);
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t i = 0; i < nv; ++i)
      mesh.vertices_.emplace_back(i == n ? upper.x() : lower.x() + double(i) * step.x(),
                                  j == n ? upper.y() : lower.y() + double(j) * step.y());

  auto vid = [nv](std::size_t i, std::size_t j) { return j * nv + i; };
  mesh.elements_.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bl = vid(i, j), br = vid(i + 1, j), tr = vid(i + 1, j + 1), tl = vid(i, j + 1);
      mesh.elements_.push_back({bl, br, tl});
      mesh.elements_.push_back({br, tr, tl});
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
  mesh.element_facets_.resize(mesh.elements_.size());
  mesh.element_facet_signs_.resize(mesh.elements_.size());
  for (std::size_t e = 0; e < mesh.elements_.size(); ++e) {
    const auto& tri = mesh.elements_[e];
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, mesh.facets_.size());
      if (inserted) {
        Facet f;
        f.vertices = {key.first, key.second};
        f.owners[0] = e;
        f.normal = edge_outward_normal(mesh.vertices_[a], mesh.vertices_[b]);
        f.length = (mesh.vertices_[b] - mesh.vertices_[a]).norm();
        mesh.facets_.push_back(f);
        mesh.element_facet_signs_[e][k] = +1;
      } else {
        Facet& f = mesh.facets_[it->second];
        if (f.owners[1]) throw std::logic_error("build_structured_mesh: facet with more than two owners");
        f.owners[1] = e;
        mesh.element_facet_signs_[e][k] = -1;
      }
      mesh.element_facets_[e][k] = it->second;
    }
  }

  mesh.vertex_facets_.resize(mesh.vertices_.size());
  for (std::size_t f = 0; f < mesh.facets_.size(); ++f) {
    Facet& facet = mesh.facets_[f];
    facet.boundary = !facet.owners[1].has_value();
    mesh.h_max_ = std::max(mesh.h_max_, facet.length);
    mesh.vertex_facets_[facet.vertices[0]].push_back(f);
    mesh.vertex_facets_[facet.vertices[1]].push_back(f);
  }
  return mesh;
}

std::size_t Mesh::num_boundary_facets() const {
  return std::size_t(std::count_if(facets_.begin(), facets_.end(), [](const Facet& f) { return f.boundary; }));
}

AffineMap Mesh::element_map(std::size_t e) const {
  const auto& tri = element(e);
  AffineMap m;
  m.origin = vertices_[tri[0]];
  m.jacobian.col(0) = vertices_[tri[1]] - vertices_[tri[0]];
  m.jacobian.col(1) = vertices_[tri[2]] - vertices_[tri[0]];
  m.det = m.jacobian.determinant();
  return m;
}

double Mesh::element_area(std::size_t e) const { return 0.5 * std::abs(element_map(e).det); }

FacetGeometry Mesh::facet_geometry(std::size_t f) const {
  if (f >= facets_.size())
    throw std::out_of_range("facet_geometry: facet " + std::to_string(f) + " out of range");
  const Facet& facet = facets_[f];
  const Point& a = vertices_[facet.vertices[0]];
  const Point& b = vertices_[facet.vertices[1]];
  return {facet.normal, (b - a).norm(), 0.5 * (a + b)};
}

Point Mesh::facet_point(std::size_t f, double t) const {
  const Facet& facet = facets_.at(f);
  return (1.0 - t) * vertices_[facet.vertices[0]] + t * vertices_[facet.vertices[1]];
}

Point Mesh::outward_normal(std::size_t e, int k) const {
  return double(element_facet_signs_.at(e)[std::size_t(k)]) * facets_[element_facets_[e][std::size_t(k)]].normal;
}

std::optional<std::pair<std::size_t, Point>> Mesh::locate(const Point& x) const {
  constexpr double tol = 1e-12;
  const Point span = upper_ - lower_;
  const Point rel((x.x() - lower_.x()) / span.x(), (x.y() - lower_.y()) / span.y());
  if (rel.x() < -tol || rel.x() > 1.0 + tol || rel.y() < -tol || rel.y() > 1.0 + tol) return std::nullopt;

  const auto cell_index = [this](double r) {
    const auto c = static_cast<long>(std::floor(r * double(cells_)));
    return static_cast<std::size_t>(std::clamp<long>(c, 0, long(cells_) - 1));
  };
  const std::size_t i = cell_index(rel.x()), j = cell_index(rel.y());
  const std::size_t lower_elem = 2 * (j * cells_ + i);
  for (std::size_t e : {lower_elem, lower_elem + 1}) {
    const AffineMap m = element_map(e);
    const Point xi = m.jacobian.inverse() * (x - m.origin);
    if (xi.x() >= -1e-10 && xi.y() >= -1e-10 && xi.x() + xi.y() <= 1.0 + 1e-10) return std::make_pair(e, xi);
  }
  return std::nullopt;
}

void Mesh::dump(std::ostream& os) const {
  os << "vertices " << vertices_.size() << '\n';
  for (const Point& v : vertices_) os << v.x() << ' ' << v.y() << '\n';
  os << "elements " << elements_.size() << '\n';
  for (const auto& t : elements_) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "facets " << facets_.size() << '\n';
  for (const Facet& f : facets_) {
    os << f.vertices[0] << ' ' << f.vertices[1] << ' ' << *f.owners[0] << ' '
       << (f.owners[1] ? long(*f.owners[1]) : -1L) << ' ' << f.normal.x() << ' ' << f.normal.y() << ' '
       << f.length << ' ' << int(f.boundary) << '\n';
  }
}

FacetGeometry facet_geometry(const Mesh& mesh, std::size_t facet_id) { return mesh.facet_geometry(facet_id); }

}  // namespace hdg
