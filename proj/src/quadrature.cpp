#include "hdg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace hdg {

namespace {

// Legendre P_n(x) and its derivative via the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
    p0 = p1;
    p1 = pk;
  }
  return {p1, double(n) * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(std::size_t(n), 0.0);
  weights.assign(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    // map [-1,1] -> [0,1], ascending order
    nodes[std::size_t(n - 1 - i)] = 0.5 * (x + 1.0);
    weights[std::size_t(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule make_quadrature(RefDomain domain, int exactness_degree) {
  if (exactness_degree < 0 || exactness_degree > max_quadrature_degree)
    throw std::invalid_argument("make_quadrature: unsupported exactness degree " + std::to_string(exactness_degree));

  QuadratureRule rule;
  rule.domain = domain;
  rule.exactness_degree = exactness_degree;
  std::vector<double> x, w;
  if (domain == RefDomain::segment) {
    gauss_legendre(exactness_degree / 2 + 1, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.points.emplace_back(x[i], 0.0);
      rule.weights.push_back(w[i]);
    }
    return rule;
  }

  // Collapsed coordinates: (s,t) in [0,1]^2 -> (s, t(1-s)), Jacobian (1-s).
  // A degree-d polynomial becomes degree d+1 in s and degree d in t.
  const int n = (exactness_degree + 2) / 2 + ((exactness_degree + 2) % 2);
  gauss_legendre(n, x, w);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double s = x[i], t = x[j];
      rule.points.emplace_back(s, t * (1.0 - s));
      rule.weights.push_back(w[i] * w[j] * (1.0 - s));
    }
  }
  return rule;
}

}  // namespace hdg
