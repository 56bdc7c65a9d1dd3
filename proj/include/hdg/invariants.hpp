#pragma once

#include "hdg/basis.hpp"
#include "hdg/mesh.hpp"
#include "hdg/quadrature.hpp"

namespace hdg {

/// Largest absolute error over monomials x^a y^b (a+b <= degree) against the closed form
/// a! b! / (a+b+2)! on the triangle and 1/(a+1) on [0,1].
double quadrature_exactness_error(RefDomain domain, int degree);

/// max |M - I| for the reference mass matrix of a basis.
double scalar_orthonormality_error(const ScalarBasis& basis);
double rt_orthonormality_error(const RTBasis& basis);

/// L2 norm of div(tau) - Pi_p div(tau), maximised over RT members.
double rt_divergence_residual(const RTBasis& basis);
/// L2 norm of tau.n - Pi_p(tau.n) on each reference edge, maximised over members and edges.
double rt_normal_trace_residual(const RTBasis& basis);

struct MeshCheck {
  bool counts = false;         // 2N^2 elements, 3N^2+2N facets, 4N on the boundary
  bool owners = false;         // 2 owners inside, 1 on the boundary, opposite signs
  bool orientation = false;    // positive Jacobians, unit normals
  double area_error = 0.0;     // |sum of areas - domain area|
};

MeshCheck check_mesh(const Mesh& mesh);

}  // namespace hdg
