#pragma once

#include "hdg/mesh.hpp"

#include <vector>

namespace hdg {

enum class RefDomain { triangle, segment };

/// Points on the reference triangle (0,0),(1,0),(0,1) or on the segment [0,1]
/// (stored in the x coordinate, y = 0).
struct QuadratureRule {
  RefDomain domain = RefDomain::triangle;
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

inline constexpr int max_quadrature_degree = 25;

/// Gauss-Legendre on the segment, collapsed (Duffy) Gauss-Legendre product on the triangle.
/// Throws std::invalid_argument for degrees outside [0, max_quadrature_degree].
QuadratureRule make_quadrature(RefDomain domain, int exactness_degree);

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace hdg
