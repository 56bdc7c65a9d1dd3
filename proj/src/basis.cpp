#include "hdg/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hdg {

namespace {

constexpr double barycenter = 1.0 / 3.0;

void check_degree(int p) {
  if (p < 0 || p > max_basis_degree) throw std::invalid_argument("basis degree " + std::to_string(p) + " unsupported");
}

/// Modified Gram-Schmidt (two passes) of the spanning set with Gram matrix `gram`.
/// Returns Q with Q * gram * Q^T = I.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, k);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const double c = q.row(j).dot(gram * v);
        v -= c * q.row(j).transpose();
      }
    }
    const double norm2 = v.dot(gram * v);
    if (!(norm2 > 1e-20 * gram(k, k)))
      throw std::runtime_error("orthonormalize: rank-deficient spanning set at member " + std::to_string(k));
    q.row(k) = v.transpose() / std::sqrt(norm2);
  }
  return q;
}

Eigen::VectorXd weights_of(const QuadratureRule& rule) {
  return Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), Eigen::Index(rule.size()));
}

}  // namespace

PolynomialSet::PolynomialSet(RefDomain domain, int degree) : domain_(domain), degree_(degree) {}

std::size_t PolynomialSet::size() const {
  const auto p = std::size_t(degree_);
  return domain_ == RefDomain::segment ? p + 1 : (p + 1) * (p + 2) / 2;
}

void PolynomialSet::evaluate(const Point& pt, double* value, double* dx, double* dy) const {
  const int p = degree_;
  if (domain_ == RefDomain::segment) {
    const double z = 2.0 * pt.x() - 1.0;
    value[0] = 1.0;
    dx[0] = dy[0] = 0.0;
    if (p == 0) return;
    value[1] = z;
    dx[1] = 2.0;
    dy[1] = 0.0;
    for (int n = 1; n < p; ++n) {
      value[n + 1] = ((2 * n + 1) * z * value[n] - n * value[n - 1]) / (n + 1);
      dx[n + 1] = ((2 * n + 1) * (2.0 * value[n] + z * dx[n]) - n * dx[n - 1]) / (n + 1);
      dy[n + 1] = 0.0;
    }
    return;
  }

  const double x = pt.x(), y = pt.y(), s = 1.0 - y, l = 2.0 * x - s;
  // Q_i and its partial derivatives, free of the collapsed-coordinate singularity at y = 1.
  std::vector<double> q(std::size_t(p) + 1), qx(q.size()), qy(q.size());
  q[0] = 1.0;
  qx[0] = qy[0] = 0.0;
  if (p > 0) {
    q[1] = l;
    qx[1] = 2.0;
    qy[1] = 1.0;
  }
  for (int n = 1; n < p; ++n) {
    const auto k = std::size_t(n);
    q[k + 1] = ((2 * n + 1) * l * q[k] - n * s * s * q[k - 1]) / (n + 1);
    qx[k + 1] = ((2 * n + 1) * (2.0 * q[k] + l * qx[k]) - n * s * s * qx[k - 1]) / (n + 1);
    qy[k + 1] = ((2 * n + 1) * (q[k] + l * qy[k]) - n * (s * s * qy[k - 1] - 2.0 * s * q[k - 1])) / (n + 1);
  }

  const double b = 2.0 * y - 1.0;
  std::vector<double> jac(std::size_t(p) + 1), djac(jac.size());
  for (int i = 0; i <= p; ++i) {
    // Jacobi P_j^{(a,0)}(b) for j <= p - i, derivative with respect to b.
    const double a = 2.0 * i + 1.0;
    const int top = p - i;
    jac[0] = 1.0;
    djac[0] = 0.0;
    if (top > 0) {
      jac[1] = (a + 1.0) + (a + 2.0) * (b - 1.0) / 2.0;
      djac[1] = (a + 2.0) / 2.0;
    }
    for (int n = 2; n <= top; ++n) {
      const auto k = std::size_t(n);
      const double c = 2.0 * n + a;
      const double lead = 2.0 * n * (n + a) * (c - 2.0);
      const double mid = c * (c - 2.0) * b + a * a;
      const double back = 2.0 * (n + a - 1.0) * (n - 1.0) * c;
      jac[k] = ((c - 1.0) * mid * jac[k - 1] - back * jac[k - 2]) / lead;
      djac[k] = ((c - 1.0) * (c * (c - 2.0) * jac[k - 1] + mid * djac[k - 1]) - back * djac[k - 2]) / lead;
    }
    for (int j = 0; j <= top; ++j) {
      const int deg = i + j;
      const auto idx = std::size_t(deg * (deg + 1) / 2 + j);
      const auto ii = std::size_t(i), jj = std::size_t(j);
      value[idx] = q[ii] * jac[jj];
      dx[idx] = qx[ii] * jac[jj];
      dy[idx] = qy[ii] * jac[jj] + 2.0 * q[ii] * djac[jj];
    }
  }
}

Eigen::MatrixXd PolynomialSet::tabulate(const std::vector<Point>& points) const {
  const auto n = Eigen::Index(size());
  Eigen::MatrixXd table(n, Eigen::Index(points.size()));
  std::vector<double> dx(size()), dy(size());
  Eigen::VectorXd col(n);
  for (std::size_t q = 0; q < points.size(); ++q) {
    evaluate(points[q], col.data(), dx.data(), dy.data());
    table.col(Eigen::Index(q)) = col;
  }
  return table;
}

std::array<Eigen::MatrixXd, 2> PolynomialSet::tabulate_gradient(const std::vector<Point>& points) const {
  const auto n = Eigen::Index(size());
  std::array<Eigen::MatrixXd, 2> out{Eigen::MatrixXd(n, Eigen::Index(points.size())),
                                     Eigen::MatrixXd(n, Eigen::Index(points.size()))};
  std::vector<double> v(size());
  Eigen::VectorXd dx(n), dy(n);
  for (std::size_t q = 0; q < points.size(); ++q) {
    evaluate(points[q], v.data(), dx.data(), dy.data());
    out[0].col(Eigen::Index(q)) = dx;
    out[1].col(Eigen::Index(q)) = dy;
  }
  return out;
}

Eigen::MatrixXd ScalarBasis::evaluate(const std::vector<Point>& points) const {
  return coefficients * PolynomialSet(domain, degree).tabulate(points);
}

ScalarBasis build_scalar_basis(RefDomain domain, int p) {
  check_degree(p);
  const QuadratureRule rule = make_quadrature(domain, 2 * p);
  const Eigen::MatrixXd table = PolynomialSet(domain, p).tabulate(rule.points);
  const Eigen::MatrixXd gram = table * weights_of(rule).asDiagonal() * table.transpose();

  ScalarBasis basis;
  basis.domain = domain;
  basis.degree = p;
  basis.coefficients = orthonormalize(gram);
  return basis;
}

RTBasis build_rt_basis(int p) {
  check_degree(p);
  const PolynomialSet set(RefDomain::triangle, p + 1);
  const auto n_all = Eigen::Index(set.size());
  const auto n_low = Eigen::Index(PolynomialSet(RefDomain::triangle, p).size());
  const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * p + 2);
  const Eigen::VectorXd w = weights_of(rule);
  const Eigen::MatrixXd table = set.tabulate(rule.points);
  const Eigen::VectorXd norms2 = (table.array().square().rowwise() * w.transpose().array()).rowwise().sum();

  // Spanning set: [P^p]^2, then z * phi for the degree-p members phi, with z the position
  // relative to the barycenter. Products are expanded in the degree p+1 set by projection.
  const Eigen::Index n_span = 2 * n_low + p + 1;
  Eigen::MatrixXd span_x = Eigen::MatrixXd::Zero(n_span, n_all);
  Eigen::MatrixXd span_y = Eigen::MatrixXd::Zero(n_span, n_all);
  for (Eigen::Index i = 0; i < n_low; ++i) {
    span_x(i, i) = 1.0;
    span_y(n_low + i, i) = 1.0;
  }
  Eigen::VectorXd zx(Eigen::Index(rule.size())), zy(zx.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    zx(Eigen::Index(q)) = rule.points[q].x() - barycenter;
    zy(Eigen::Index(q)) = rule.points[q].y() - barycenter;
  }
  const Eigen::MatrixXd project = table * w.asDiagonal();
  for (int j = 0; j <= p; ++j) {
    const Eigen::Index member = p * (p + 1) / 2 + j, row = 2 * n_low + j;
    span_x.row(row) = (project * zx.cwiseProduct(table.row(member).transpose())).cwiseQuotient(norms2).transpose();
    span_y.row(row) = (project * zy.cwiseProduct(table.row(member).transpose())).cwiseQuotient(norms2).transpose();
  }

  const Eigen::MatrixXd gram = span_x * norms2.asDiagonal() * span_x.transpose() +
                               span_y * norms2.asDiagonal() * span_y.transpose();
  const Eigen::MatrixXd q = orthonormalize(gram);

  RTBasis basis;
  basis.degree = p;
  basis.x_coefficients = q * span_x;
  basis.y_coefficients = q * span_y;
  const auto grad = set.tabulate_gradient(rule.points);
  const Eigen::MatrixXd div = basis.x_coefficients * grad[0] + basis.y_coefficients * grad[1];
  basis.div_coefficients =
      (div * w.asDiagonal() * table.topRows(n_low).transpose()) * norms2.head(n_low).cwiseInverse().asDiagonal();
  return basis;
}

VectorValues RTBasis::evaluate(const std::vector<Point>& points) const {
  const Eigen::MatrixXd table = PolynomialSet(RefDomain::triangle, degree + 1).tabulate(points);
  return {x_coefficients * table, y_coefficients * table, div_coefficients * table.topRows(div_coefficients.cols())};
}

Point reference_vertex(int k) {
  switch (k % 3) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

Point reference_edge_normal(int k) {
  const Point d = reference_vertex(k + 2) - reference_vertex(k + 1);
  return Point(d.y(), -d.x()) / d.norm();
}

Eigen::MatrixXd RTBasis::normal_trace(int edge, const std::vector<double>& t) const {
  std::vector<Point> points;
  points.reserve(t.size());
  for (double s : t) points.push_back((1.0 - s) * reference_vertex(edge + 1) + s * reference_vertex(edge + 2));
  const VectorValues v = evaluate(points);
  const Point n = reference_edge_normal(edge);
  return n.x() * v.x + n.y() * v.y;
}

ElementBasis::ElementBasis(const AffineMap& map, const ScalarBasis& scalar, const RTBasis& rt)
    : map_(map), scalar_(&scalar), rt_(&rt), scalar_scale_(1.0 / std::sqrt(std::abs(map.det))) {
  const auto n = Eigen::Index(rt.dimension());
  flux_transform_ = Eigen::MatrixXd::Identity(n, n);
  const QuadratureRule rule = make_quadrature(RefDomain::triangle, 2 * rt.degree + 2);
  const VectorValues v = flux_values(rule.points);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q] * std::abs(map.det);
    const auto iq = Eigen::Index(q);
    gram.noalias() += w * (v.x.col(iq) * v.x.col(iq).transpose() + v.y.col(iq) * v.y.col(iq).transpose());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("ElementBasis: flux mass matrix not positive definite");
  flux_transform_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd ElementBasis::scalar_values(const std::vector<Point>& ref_points) const {
  return scalar_scale_ * scalar_->evaluate(ref_points);
}

VectorValues ElementBasis::flux_values(const std::vector<Point>& ref_points) const {
  const VectorValues ref = rt_->evaluate(ref_points);
  const Eigen::Matrix2d& j = map_.jacobian;
  const double inv_det = 1.0 / map_.det;
  VectorValues out;
  out.x = flux_transform_ * (inv_det * (j(0, 0) * ref.x + j(0, 1) * ref.y));
  out.y = flux_transform_ * (inv_det * (j(1, 0) * ref.x + j(1, 1) * ref.y));
  out.div = flux_transform_ * (inv_det * ref.div);
  return out;
}

}  // namespace hdg
