#include "hdg/analysis.hpp"
#include "hdg/assembly.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

using namespace hdg;

namespace {

const Complex J(0.0, 1.0);

struct LocalTuple {
  Eigen::VectorXcd interior, facet;
};

LocalTuple random_tuple(const Discretization& disc, std::mt19937& rng) {
  std::normal_distribution<double> d;
  auto draw = [&](std::size_t n) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(d(rng), d(rng));
    return v;
  };
  return {draw(disc.interior_dim()), draw(disc.local_facet_dim())};
}

// B(U, V) integrated term by term on element e with a rule of its own.
Complex form_oracle(const Discretization& disc, std::size_t e, const ProblemData& data, const LocalTuple& U,
                    const LocalTuple& V) {
  const Mesh& mesh = disc.mesh();
  const ElementBasis& eb = disc.element_basis(e);
  const auto nf = Eigen::Index(disc.flux_dim()), ns = Eigen::Index(disc.scalar_dim());
  const int p = disc.degree();
  const double kappa = data.kappa;

  Complex b = 0.0;
  const QuadratureRule vol = make_quadrature(RefDomain::triangle, 2 * p + 6);
  const VectorValues fv = eb.flux_values(vol.points);
  const Eigen::MatrixXd sv = eb.scalar_values(vol.points);
  for (std::size_t q = 0; q < vol.size(); ++q) {
    const auto iq = Eigen::Index(q);
    const double w = vol.weights[q] * std::abs(eb.map().det);
    Complex sx_u = 0, sy_u = 0, sd_u = 0, u_u = 0, sx_v = 0, sy_v = 0, sd_v = 0, u_v = 0;
    for (Eigen::Index j = 0; j < nf; ++j) {
      sx_u += U.interior(j) * fv.x(j, iq);
      sy_u += U.interior(j) * fv.y(j, iq);
      sd_u += U.interior(j) * fv.div(j, iq);
      sx_v += V.interior(j) * fv.x(j, iq);
      sy_v += V.interior(j) * fv.y(j, iq);
      sd_v += V.interior(j) * fv.div(j, iq);
    }
    for (Eigen::Index j = 0; j < ns; ++j) {
      u_u += U.interior(nf + j) * sv(j, iq);
      u_v += V.interior(nf + j) * sv(j, iq);
    }
    const double c = data.c(eb.map().map(vol.points[q]));
    b += w * (J * kappa * (sx_u * std::conj(sx_v) + sy_u * std::conj(sy_v)) + u_u * std::conj(sd_v) +
              sd_u * std::conj(u_v) - J * kappa * c * u_u * std::conj(u_v));
  }

  const QuadratureRule seg = make_quadrature(RefDomain::segment, 2 * p + 6);
  std::vector<double> t;
  for (const Point& x : seg.points) t.push_back(x.x());
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(seg.points);
  const auto np = Eigen::Index(disc.facet_dim());
  for (int k = 0; k < 3; ++k) {
    const std::size_t f = mesh.element_facets(e)[std::size_t(k)];
    const double s = mesh.element_facet_signs(e)[std::size_t(k)];
    const Point n = mesh.outward_normal(e, k);
    const double len = mesh.facet(f).length;
    const auto ref = disc.edge_reference_points(e, k, t);
    const VectorValues ev = eb.flux_values(ref);
    const Eigen::MatrixXd es = eb.scalar_values(ref);
    for (std::size_t q = 0; q < seg.size(); ++q) {
      const auto iq = Eigen::Index(q);
      const double w = seg.weights[q] * len;
      Complex sn_u = 0, sn_v = 0, u_u = 0, u_v = 0, sh_u = 0, sh_v = 0, uh_u = 0, uh_v = 0;
      for (Eigen::Index j = 0; j < nf; ++j) {
        const double tn = ev.x(j, iq) * n.x() + ev.y(j, iq) * n.y();
        sn_u += U.interior(j) * tn;
        sn_v += V.interior(j) * tn;
      }
      for (Eigen::Index j = 0; j < ns; ++j) {
        u_u += U.interior(nf + j) * es(j, iq);
        u_v += V.interior(nf + j) * es(j, iq);
      }
      for (Eigen::Index i = 0; i < np; ++i) {
        const auto fi = Eigen::Index(disc.local_facet_dof(k, FacetVariable::flux, std::size_t(i)));
        const auto ti = Eigen::Index(disc.local_facet_dof(k, FacetVariable::trace, std::size_t(i)));
        sh_u += U.facet(fi) * mu(i, iq);
        sh_v += V.facet(fi) * mu(i, iq);
        uh_u += U.facet(ti) * mu(i, iq);
        uh_v += V.facet(ti) * mu(i, iq);
      }
      b += w * (-uh_u * std::conj(sn_v) - sn_u * std::conj(uh_v) -
                data.alpha * (u_u - uh_u) * std::conj(u_v - uh_v) +
                data.beta * (sn_u - s * sh_u) * std::conj(sn_v - s * sh_v));
      if (mesh.facet(f).boundary) b -= w * uh_u * std::conj(uh_v);
    }
  }
  return b;
}

Complex matrix_form(const ElementBlocks& blk, const LocalTuple& U, const LocalTuple& V) {
  const Eigen::VectorXcd ai = blk.a_ii * U.interior + blk.a_if * U.facet;
  const Eigen::VectorXcd af = blk.a_fi * U.interior + blk.a_ff * U.facet;
  return V.interior.dot(ai) + V.facet.dot(af);  // dot conjugates its first argument
}

}  // namespace

TEST(Assembly, FormMatchesQuadratureOracle) {
  std::mt19937 rng(42);
  ProblemData data;
  data.kappa = 3.0;
  data.alpha = 0.7;
  data.beta = 1.3;
  data.coefficient = [](const Point& x) { return 2.0 + x.x() - 0.5 * x.y(); };
  for (int p = 0; p <= 2; ++p) {
    const Discretization disc(build_structured_mesh(3, Point(-1.0, 0.0), Point(1.0, 1.5)), p);
    for (std::size_t e : {std::size_t(0), std::size_t(7), disc.mesh().num_elements() - 1}) {
      const ElementBlocks blk = assemble_element(disc, e, data);
      for (int trial = 0; trial < 3; ++trial) {
        const LocalTuple U = random_tuple(disc, rng), V = random_tuple(disc, rng);
        const Complex oracle = form_oracle(disc, e, data, U, V);
        EXPECT_LT(std::abs(matrix_form(blk, U, V) - oracle), 1e-11 * (1.0 + std::abs(oracle)))
            << "p=" << p << " e=" << e;
      }
    }
  }
}

TEST(Assembly, RhsMatchesOracle) {
  // polynomial g of degree 2 on each edge, integrated exactly by the assembly rule
  ProblemData data;
  data.kappa = 4.0;
  const auto g = [](const Point& x, const Point& n) { return Complex(x.x() * x.y() + n.x(), 2.0 * x.y() - n.y()); };
  data.excitation = g;
  const Discretization disc(build_structured_mesh(2), 2);
  std::mt19937 rng(3);
  const QuadratureRule seg = make_quadrature(RefDomain::segment, 20);
  const Eigen::MatrixXd mu = disc.facet_basis().evaluate(seg.points);
  for (std::size_t e = 0; e < disc.mesh().num_elements(); ++e) {
    const ElementBlocks blk = assemble_element(disc, e, data);
    const LocalTuple V = random_tuple(disc, rng);
    Complex oracle = 0.0;
    for (int k = 0; k < 3; ++k) {
      const std::size_t f = disc.mesh().element_facets(e)[std::size_t(k)];
      if (!disc.mesh().facet(f).boundary) continue;
      for (std::size_t q = 0; q < seg.size(); ++q) {
        const Point x = disc.mesh().facet_point(f, seg.points[q].x());
        Complex vh = 0.0;
        for (std::size_t i = 0; i < disc.facet_dim(); ++i)
          vh += V.facet(Eigen::Index(disc.local_facet_dof(k, FacetVariable::trace, i))) * mu(Eigen::Index(i), Eigen::Index(q));
        oracle -= seg.weights[q] * disc.mesh().facet(f).length * g(x, disc.mesh().outward_normal(e, k)) * std::conj(vh);
      }
    }
    const Complex got = V.interior.dot(blk.rhs_i) + V.facet.dot(blk.rhs_f);
    EXPECT_LT(std::abs(got - oracle), 1e-13 * (1.0 + std::abs(oracle)));
    EXPECT_EQ(blk.rhs_i.norm(), 0.0);
  }
}

TEST(Assembly, OrthonormalBlocks) {
  // the sigma-sigma block is j kappa (sigma, tau) + beta (sigma.n, tau.n); extrapolate to beta = 0
  ProblemData data;
  data.kappa = 2.5;
  const Discretization disc(build_structured_mesh(2, Point(0.0, 0.0), Point(3.0, 1.0)), 2);
  const auto nf = Eigen::Index(disc.flux_dim());
  data.beta = 1.0;
  const Eigen::MatrixXcd s1 = assemble_element(disc, 3, data).a_ii.topLeftCorner(nf, nf);
  data.beta = 2.0;
  const Eigen::MatrixXcd s2 = assemble_element(disc, 3, data).a_ii.topLeftCorner(nf, nf);
  const Eigen::MatrixXcd ss = 2.0 * s1 - s2;
  EXPECT_LT((ss - Complex(0.0, 2.5) * Eigen::MatrixXcd::Identity(nf, nf)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assembly, ConstantFacetFunctions) {
  // with g = 1 the trace rows of a boundary edge carry -|F| on the constant mode; beta |F| sits
  // on the sigma_hat diagonal of the constant mode
  ProblemData data;
  data.kappa = 1.0;
  data.beta = 1.7;
  data.excitation = [](const Point&, const Point&) { return Complex(1.0); };
  const Discretization disc(build_structured_mesh(2, Point(0.0, 0.0), Point(2.0, 1.0)), 1);
  const Mesh& mesh = disc.mesh();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const ElementBlocks blk = assemble_element(disc, e, data);
    for (int k = 0; k < 3; ++k) {
      const Facet& f = mesh.facet(mesh.element_facets(e)[std::size_t(k)]);
      const auto c0 = Eigen::Index(disc.local_facet_dof(k, FacetVariable::flux, 0));
      EXPECT_NEAR(std::abs(blk.a_ff(c0, c0) - 1.7 * f.length), 0.0, 1e-13);
      const auto t0 = Eigen::Index(disc.local_facet_dof(k, FacetVariable::trace, 0));
      const auto t1 = Eigen::Index(disc.local_facet_dof(k, FacetVariable::trace, 1));
      EXPECT_NEAR(std::abs(blk.rhs_f(t0) - (f.boundary ? -f.length : 0.0)), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(blk.rhs_f(t1)), 0.0, 1e-13);
    }
  }
}

TEST(Assembly, GlobalRhsIsScatteredElementRhs) {
  const ProblemData data = plane_wave(5.0, 0.5).problem();
  const Discretization disc(build_structured_mesh(3), 1);
  Eigen::VectorXcd scattered = Eigen::VectorXcd::Zero(Eigen::Index(disc.skeleton_dim()));
  for (std::size_t e = 0; e < disc.mesh().num_elements(); ++e) {
    const ElementBlocks blk = assemble_element(disc, e, data);
    const auto dofs = disc.element_skeleton_dofs(e);
    for (std::size_t i = 0; i < dofs.size(); ++i) scattered(dofs[i]) += blk.rhs_f(Eigen::Index(i));
  }
  EXPECT_LT((scattered - assemble_rhs(disc, data)).norm(), 1e-14);
}

TEST(Assembly, RejectsBadInput) {
  ProblemData data;
  data.kappa = 0.0;
  const Discretization disc(build_structured_mesh(1), 0);
  EXPECT_THROW(assemble_all(disc, data), std::invalid_argument);
  data.kappa = 1.0;
  data.alpha = -1.0;
  EXPECT_THROW(assemble_all(disc, data), std::invalid_argument);
  EXPECT_THROW(Discretization(build_structured_mesh(1), 2, 6), std::invalid_argument);
  EXPECT_NO_THROW(Discretization(build_structured_mesh(1), 2, 7));
}
