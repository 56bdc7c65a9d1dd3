#pragma once

#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace hdg {

inline constexpr int max_basis_degree = 6;

/// Orthogonal polynomials ordered by total degree, so degree-q members form a prefix.
/// Triangle: Dubiner functions Q_i(x, y) P_j^{(2i+1,0)}(2y-1) with Q_i = (1-y)^i P_i(2x/(1-y) - 1),
/// stored at index k(k+1)/2 + j for k = i+j. Segment: Legendre polynomials P_k(2t-1).
/// Members are mutually L2-orthogonal on the reference domain but not normalized.
class PolynomialSet {
 public:
  PolynomialSet(RefDomain domain, int degree);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] std::size_t size() const;
  /// size() x points.size() table of values.
  [[nodiscard]] Eigen::MatrixXd tabulate(const std::vector<Point>& points) const;
  /// Partial derivatives in x and y (the y table is zero on the segment).
  [[nodiscard]] std::array<Eigen::MatrixXd, 2> tabulate_gradient(const std::vector<Point>& points) const;

 private:
  void evaluate(const Point& x, double* value, double* dx, double* dy) const;
  RefDomain domain_;
  int degree_;
};

/// P^p on the reference triangle or segment, L2-orthonormal on the reference domain.
struct ScalarBasis {
  RefDomain domain = RefDomain::triangle;
  int degree = 0;
  /// Row i holds the PolynomialSet coefficients of basis function i.
  Eigen::MatrixXd coefficients;

  [[nodiscard]] std::size_t dimension() const { return std::size_t(coefficients.rows()); }
  /// dimension() x points.size() values.
  [[nodiscard]] Eigen::MatrixXd evaluate(const std::vector<Point>& points) const;
};

/// Values of a vector-valued basis at a set of points, one row per basis function.
struct VectorValues {
  Eigen::MatrixXd x, y, div;
};

/// RT^p on the reference triangle: [P^p]^2 + x * (homogeneous P^p), L2-orthonormal.
struct RTBasis {
  int degree = 0;
  Eigen::MatrixXd x_coefficients;    // over PolynomialSet(triangle, p+1)
  Eigen::MatrixXd y_coefficients;    // over PolynomialSet(triangle, p+1)
  Eigen::MatrixXd div_coefficients;  // over PolynomialSet(triangle, p)

  [[nodiscard]] std::size_t dimension() const { return std::size_t(x_coefficients.rows()); }
  [[nodiscard]] VectorValues evaluate(const std::vector<Point>& points) const;
  /// Normal trace on reference edge k (opposite vertex k) at edge parameters t in [0,1],
  /// with the edge traversed from vertex k+1 to vertex k+2 and the outward reference normal.
  [[nodiscard]] Eigen::MatrixXd normal_trace(int edge, const std::vector<double>& t) const;
};

/// Throws std::invalid_argument for degrees outside [0, max_basis_degree].
ScalarBasis build_scalar_basis(RefDomain domain, int p);
/// Throws std::runtime_error on rank deficiency of the spanning set.
RTBasis build_rt_basis(int p);

/// Reference vertices of the unit triangle and the outward normal of reference edge k.
Point reference_vertex(int k);
Point reference_edge_normal(int k);

/// Volume bases of one physical element, orthonormal in L2(T): scalars composed with the
/// affine map, RT members mapped by the contravariant Piola transform, then orthonormalized.
class ElementBasis {
 public:
  ElementBasis(const AffineMap& map, const ScalarBasis& scalar, const RTBasis& rt);

  [[nodiscard]] const AffineMap& map() const { return map_; }
  /// Physical values at reference points.
  [[nodiscard]] Eigen::MatrixXd scalar_values(const std::vector<Point>& ref_points) const;
  [[nodiscard]] VectorValues flux_values(const std::vector<Point>& ref_points) const;
  [[nodiscard]] const Eigen::MatrixXd& flux_transform() const { return flux_transform_; }

 private:
  AffineMap map_;
  const ScalarBasis* scalar_;
  const RTBasis* rt_;
  double scalar_scale_ = 1.0;
  Eigen::MatrixXd flux_transform_;
};

}  // namespace hdg
