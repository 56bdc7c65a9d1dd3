#include "hdg/basis.hpp"
#include "hdg/invariants.hpp"
#include "hdg/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace hdg;

TEST(Quadrature, ExactnessSweep) {
  for (int d = 0; d <= max_quadrature_degree; ++d) {
    EXPECT_LT(quadrature_exactness_error(RefDomain::triangle, d), 1e-13) << d;
    EXPECT_LT(quadrature_exactness_error(RefDomain::segment, d), 1e-13) << d;
  }
}

TEST(Quadrature, WeightsSumToMeasure) {
  for (int d : {0, 1, 5, 12, 25}) {
    const QuadratureRule t = make_quadrature(RefDomain::triangle, d);
    const QuadratureRule s = make_quadrature(RefDomain::segment, d);
    EXPECT_NEAR(std::accumulate(t.weights.begin(), t.weights.end(), 0.0), 0.5, 1e-15);
    EXPECT_NEAR(std::accumulate(s.weights.begin(), s.weights.end(), 0.0), 1.0, 1e-15);
    for (const Point& p : t.points) {
      EXPECT_GT(p.x(), 0.0);
      EXPECT_GT(p.y(), 0.0);
      EXPECT_LT(p.x() + p.y(), 1.0);
    }
    EXPECT_GE(t.exactness_degree, d);
  }
}

TEST(Quadrature, MidpointAndRange) {
  std::vector<double> x, w;
  gauss_legendre(1, x, w);
  ASSERT_EQ(x.size(), 1u);
  EXPECT_DOUBLE_EQ(x[0], 0.5);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  gauss_legendre(2, x, w);
  EXPECT_NEAR(x[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_THROW(make_quadrature(RefDomain::triangle, -1), std::invalid_argument);
  EXPECT_THROW(make_quadrature(RefDomain::segment, max_quadrature_degree + 1), std::invalid_argument);
}

TEST(Basis, Dimensions) {
  for (int p = 0; p <= max_basis_degree; ++p) {
    const auto q = std::size_t(p);
    EXPECT_EQ(build_rt_basis(p).dimension(), (q + 1) * (q + 3));
    EXPECT_EQ(build_scalar_basis(RefDomain::triangle, p).dimension(), (q + 1) * (q + 2) / 2);
    EXPECT_EQ(build_scalar_basis(RefDomain::segment, p).dimension(), q + 1);
  }
  EXPECT_EQ(build_rt_basis(0).dimension(), 3u);
  EXPECT_EQ(build_rt_basis(1).dimension(), 8u);
  EXPECT_THROW(build_rt_basis(max_basis_degree + 1), std::invalid_argument);
  EXPECT_THROW(build_scalar_basis(RefDomain::triangle, -1), std::invalid_argument);
}

TEST(Basis, OrthonormalOnFinerRule) {
  // mass matrices on a rule far above the construction rule
  const QuadratureRule tri = make_quadrature(RefDomain::triangle, 20);
  const QuadratureRule seg = make_quadrature(RefDomain::segment, 20);
  for (int p = 0; p <= max_basis_degree; ++p) {
    const VectorValues v = build_rt_basis(p).evaluate(tri.points);
    const Eigen::MatrixXd s = build_scalar_basis(RefDomain::triangle, p).evaluate(tri.points);
    const Eigen::MatrixXd f = build_scalar_basis(RefDomain::segment, p).evaluate(seg.points);
    const Eigen::Map<const Eigen::VectorXd> wt(tri.weights.data(), Eigen::Index(tri.size()));
    const Eigen::Map<const Eigen::VectorXd> ws(seg.weights.data(), Eigen::Index(seg.size()));
    const Eigen::MatrixXd mrt = v.x * wt.asDiagonal() * v.x.transpose() + v.y * wt.asDiagonal() * v.y.transpose();
    const Eigen::MatrixXd ms = s * wt.asDiagonal() * s.transpose();
    const Eigen::MatrixXd mf = f * ws.asDiagonal() * f.transpose();
    EXPECT_LT((mrt - Eigen::MatrixXd::Identity(mrt.rows(), mrt.cols())).cwiseAbs().maxCoeff(), 1e-12) << p;
    EXPECT_LT((ms - Eigen::MatrixXd::Identity(ms.rows(), ms.cols())).cwiseAbs().maxCoeff(), 1e-12) << p;
    EXPECT_LT((mf - Eigen::MatrixXd::Identity(mf.rows(), mf.cols())).cwiseAbs().maxCoeff(), 1e-12) << p;
  }
}

TEST(Basis, InvariantSuite) {
  for (int p = 0; p <= max_basis_degree; ++p) {
    const RTBasis rt = build_rt_basis(p);
    EXPECT_LT(rt_orthonormality_error(rt), 1e-12);
    EXPECT_LT(rt_divergence_residual(rt), 1e-12);
    EXPECT_LT(rt_normal_trace_residual(rt), 1e-12);
    EXPECT_LT(scalar_orthonormality_error(build_scalar_basis(RefDomain::triangle, p)), 1e-12);
  }
}

TEST(Basis, DivergenceMatchesFiniteDifferences) {
  const double h = 1e-5;
  const std::vector<Point> pts{{0.2, 0.3}, {0.6, 0.1}, {0.1, 0.7}, {1.0 / 3.0, 1.0 / 3.0}};
  for (int p = 0; p <= 4; ++p) {
    const RTBasis rt = build_rt_basis(p);
    for (const Point& x : pts) {
      const VectorValues c = rt.evaluate({x});
      const VectorValues xp = rt.evaluate({x + Point(h, 0.0)}), xm = rt.evaluate({x - Point(h, 0.0)});
      const VectorValues yp = rt.evaluate({x + Point(0.0, h)}), ym = rt.evaluate({x - Point(0.0, h)});
      const Eigen::VectorXd fd = (xp.x - xm.x + yp.y - ym.y) / (2.0 * h);
      EXPECT_LT((fd - c.div).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + c.div.cwiseAbs().maxCoeff())) << p;
    }
  }
}

namespace {

// Discrete L2 distance of (fx, fy) from the span of the RT basis.
double distance_from_rt(const RTBasis& rt, const std::function<Point(const Point&)>& f) {
  const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * rt.degree + 6);
  const VectorValues v = rt.evaluate(rule.points);
  Eigen::VectorXd fx(Eigen::Index(rule.size())), fy(fx.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point y = f(rule.points[q]);
    fx(Eigen::Index(q)) = y.x();
    fy(Eigen::Index(q)) = y.y();
  }
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), Eigen::Index(rule.size()));
  const Eigen::VectorXd c = v.x * w.asDiagonal() * fx + v.y * w.asDiagonal() * fy;
  const Eigen::VectorXd rx = fx - v.x.transpose() * c, ry = fy - v.y.transpose() * c;
  return std::sqrt((rx.array().square() * w.array()).sum() + (ry.array().square() * w.array()).sum());
}

}  // namespace

TEST(Basis, RTSpan) {
  for (int p = 0; p <= 3; ++p) {
    const RTBasis rt = build_rt_basis(p);
    for (int a = 0; a <= p; ++a) {
      for (int b = 0; a + b <= p; ++b) {
        const auto m = [a, b](const Point& x) { return std::pow(x.x(), a) * std::pow(x.y(), b); };
        EXPECT_LT(distance_from_rt(rt, [&](const Point& x) { return Point(m(x), 0.0); }), 1e-12);
        EXPECT_LT(distance_from_rt(rt, [&](const Point& x) { return Point(0.0, m(x)); }), 1e-12);
        EXPECT_LT(distance_from_rt(rt, [&](const Point& x) { return Point(x * m(x)); }), 1e-12);
      }
    }
    // (x^{p+1}, 0) is not of the form q0 + x q
    EXPECT_GT(distance_from_rt(rt, [&](const Point& x) { return Point(std::pow(x.x(), p + 1), 0.0); }), 1e-4);
  }
}

TEST(Basis, ElementBasisIsOrthonormalOnPhysicalElement) {
  AffineMap map;
  map.origin = Point(0.3, -0.2);
  map.jacobian << 0.25, -0.1, 0.05, 0.4;
  map.det = map.jacobian.determinant();
  for (int p = 0; p <= 3; ++p) {
    const RTBasis rt = build_rt_basis(p);
    const ScalarBasis s = build_scalar_basis(RefDomain::triangle, p);
    const ElementBasis eb(map, s, rt);
    const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * p + 4);
    const VectorValues v = eb.flux_values(rule.points);
    const Eigen::MatrixXd sv = eb.scalar_values(rule.points);
    Eigen::VectorXd w(Eigen::Index(rule.size()));
    for (std::size_t q = 0; q < rule.size(); ++q) w(Eigen::Index(q)) = rule.weights[q] * map.det;
    const Eigen::MatrixXd mf = v.x * w.asDiagonal() * v.x.transpose() + v.y * w.asDiagonal() * v.y.transpose();
    const Eigen::MatrixXd ms = sv * w.asDiagonal() * sv.transpose();
    EXPECT_LT((mf - Eigen::MatrixXd::Identity(mf.rows(), mf.cols())).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LT((ms - Eigen::MatrixXd::Identity(ms.rows(), ms.cols())).cwiseAbs().maxCoeff(), 1e-11);

    // physical divergence by finite differences through the inverse map
    const Point xi(0.25, 0.35);
    const double h = 1e-6;
    const Eigen::Matrix2d jinv = map.jacobian.inverse();
    const Point dx = jinv * Point(h, 0.0), dy = jinv * Point(0.0, h);
    const Eigen::VectorXd fd = (eb.flux_values({xi + dx}).x - eb.flux_values({xi - dx}).x +
                                eb.flux_values({xi + dy}).y - eb.flux_values({xi - dy}).y) /
                               (2.0 * h);
    const Eigen::VectorXd div = eb.flux_values({xi}).div;
    EXPECT_LT((fd - div).cwiseAbs().maxCoeff(), 1e-5 * (1.0 + div.cwiseAbs().maxCoeff()));
  }
}

TEST(Basis, ReferenceGeometry) {
  EXPECT_EQ(reference_edge_normal(0), Point(1.0, 1.0) / std::sqrt(2.0));
  EXPECT_EQ(reference_edge_normal(1), Point(-1.0, 0.0));
  EXPECT_EQ(reference_edge_normal(2), Point(0.0, -1.0));
}
