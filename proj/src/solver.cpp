#include "hdg/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXcd& x, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  const double nr = (b - a * x).norm();
  return nb > 0.0 ? nr / nb : nr;
}

Eigen::VectorXcd sparse_lu_solve(const SparseMatrix& matrix, const Eigen::VectorXcd& rhs) {
  Eigen::SparseMatrix<Complex, Eigen::ColMajor> a = matrix;
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU failed: " + lu.lastErrorMessage());
  Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU solve failed");
  return x;
}

template <class BlockSource>
CondensedProblem condense_with(const Discretization& disc, std::size_t num_elements, BlockSource&& block_of) {
  CondensedProblem out;
  out.elements.resize(num_elements);
  const auto n = Eigen::Index(disc.skeleton_dim());
  out.system.rhs = Eigen::VectorXcd::Zero(n);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(num_elements * disc.local_facet_dim() * disc.local_facet_dim());

  for (std::size_t e = 0; e < num_elements; ++e) {
    const ElementBlocks& b = block_of(e);
    CondensedElement& ce = out.elements[e];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b.a_ii);
    ce.rcond = lu.rcond();
    if (!(ce.rcond > 1e3 * std::numeric_limits<double>::epsilon()))
      throw std::runtime_error("condense: singular interior block on element " + std::to_string(e));
    ce.recovery = lu.solve(b.a_if);
    ce.recovery_rhs = lu.solve(b.rhs_i);
    ce.skeleton_dofs = disc.element_skeleton_dofs(e);

    const Eigen::MatrixXcd s = b.a_ff - b.a_fi * ce.recovery;
    const Eigen::VectorXcd g = b.rhs_f - b.a_fi * ce.recovery_rhs;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const Eigen::Index gi = ce.skeleton_dofs[std::size_t(i)];
      out.system.rhs(gi) += g(i);
      for (Eigen::Index j = 0; j < s.cols(); ++j)
        triplets.emplace_back(gi, ce.skeleton_dofs[std::size_t(j)], s(i, j));
    }
  }
  out.system.matrix.resize(n, n);
  out.system.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.system.matrix.makeCompressed();
  return out;
}

}  // namespace

CondensedProblem condense(const Discretization& disc, const std::vector<ElementBlocks>& blocks) {
  if (blocks.size() != disc.mesh().num_elements()) throw std::invalid_argument("condense: block count mismatch");
  return condense_with(disc, blocks.size(), [&](std::size_t e) -> const ElementBlocks& { return blocks[e]; });
}

CondensedProblem condense(const Discretization& disc, const ProblemData& data) {
  data.validate();
  ElementBlocks current;
  return condense_with(disc, disc.mesh().num_elements(), [&](std::size_t e) -> const ElementBlocks& {
    current = assemble_element(disc, e, data);
    return current;
  });
}

Eigen::VectorXcd solve_direct(const SkeletonSystem& sys, SolverStats* stats) {
  const auto start = Clock::now();
  Eigen::VectorXcd x = sparse_lu_solve(sys.matrix, sys.rhs);
  if (stats) {
    stats->iterations = 0;
    stats->residual = relative_residual(sys.matrix, x, sys.rhs);
    stats->seconds = seconds_since(start);
    stats->converged = true;
  }
  return x;
}

BlockGaussSeidel::BlockGaussSeidel(const SparseMatrix& matrix, std::vector<std::vector<Eigen::Index>> blocks,
                                   Sweep sweep)
    : matrix_(&matrix), blocks_(std::move(blocks)), sweep_(sweep) {
  factors_.reserve(blocks_.size());
  for (const auto& block : blocks_) {
    const auto m = Eigen::Index(block.size());
    Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      // block index lists are sorted, so each entry of row i can be located by binary search
      for (SparseMatrix::InnerIterator it(matrix, block[std::size_t(i)]); it; ++it) {
        const auto pos = std::lower_bound(block.begin(), block.end(), it.col());
        if (pos != block.end() && *pos == it.col()) local(i, pos - block.begin()) = it.value();
      }
    }
    factors_.emplace_back(local);
  }
}

void BlockGaussSeidel::relax(std::size_t b, const Eigen::VectorXcd& r, Eigen::VectorXcd& z) const {
  const auto& block = blocks_[b];
  Eigen::VectorXcd defect(Eigen::Index(block.size()));
  for (std::size_t i = 0; i < block.size(); ++i) {
    Complex az(0.0);
    for (SparseMatrix::InnerIterator it(*matrix_, block[i]); it; ++it) az += it.value() * z(it.col());
    defect(Eigen::Index(i)) = r(block[i]) - az;
  }
  const Eigen::VectorXcd update = factors_[b].solve(defect);
  for (std::size_t i = 0; i < block.size(); ++i) z(block[i]) += update(Eigen::Index(i));
}

Eigen::VectorXcd BlockGaussSeidel::apply(const Eigen::VectorXcd& r) const {
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(r.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) relax(b, r, z);
  if (sweep_ == Sweep::symmetric)
    for (std::size_t b = blocks_.size(); b-- > 0;) relax(b, r, z);
  return z;
}

std::vector<std::vector<Eigen::Index>> build_vertex_patch_blocks(const Discretization& disc) {
  const Mesh& mesh = disc.mesh();
  std::vector<std::vector<Eigen::Index>> blocks(mesh.num_vertices());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    for (std::size_t f : mesh.vertex_facets(v))
      for (auto var : {FacetVariable::flux, FacetVariable::trace})
        for (std::size_t i = 0; i < disc.facet_dim(); ++i)
          blocks[v].push_back(Eigen::Index(disc.skeleton_dof(f, var, i)));
    std::sort(blocks[v].begin(), blocks[v].end());
  }
  return blocks;
}

Eigen::VectorXcd solve_bicgstab(const SkeletonSystem& sys, const BlockGaussSeidel& precond, double tol,
                                int max_iter, SolverStats* stats) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_bicgstab: tolerance must be positive");
  const auto start = Clock::now();
  const SparseMatrix& a = sys.matrix;
  const Eigen::VectorXcd& b = sys.rhs;
  const Eigen::Index n = b.size();
  const double nb = b.norm();

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  SolverStats local;
  if (nb == 0.0) {
    local.seconds = seconds_since(start);
    if (stats) *stats = local;
    return x;
  }

  Eigen::VectorXcd r = b;
  Eigen::VectorXcd r_hat = r;
  Eigen::VectorXcd p = Eigen::VectorXcd::Zero(n), v = Eigen::VectorXcd::Zero(n);
  Complex rho(1.0), alpha(1.0), omega(1.0);
  Eigen::VectorXcd x_best = x;
  double best = 1.0;
  bool restarted = false;
  constexpr double breakdown = 1e-15;

  int it = 0;
  bool converged = false;
  while (it < max_iter) {
    ++it;
    const Complex rho_new = r_hat.dot(r);
    if (std::abs(rho_new) < breakdown * r_hat.norm() * r.norm()) {
      if (restarted) break;
      restarted = true;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1.0);
      --it;
      continue;
    }
    const Complex beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    const Eigen::VectorXcd y = precond.apply(p);
    v = a * y;
    const Complex denom = r_hat.dot(v);
    if (std::abs(denom) < breakdown * r_hat.norm() * v.norm()) {
      if (restarted) break;
      restarted = true;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1.0);
      continue;
    }
    alpha = rho / denom;
    x += alpha * y;
    r -= alpha * v;
    double res = r.norm() / nb;
    if (res < best) {
      best = res;
      x_best = x;
    }
    if (res <= tol) {
      converged = true;
      break;
    }
    const Eigen::VectorXcd z = precond.apply(r);
    const Eigen::VectorXcd t = a * z;
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(r) / tt : Complex(0.0);
    x += omega * z;
    r -= omega * t;
    res = r.norm() / nb;
    if (res < best) {
      best = res;
      x_best = x;
    }
    if (res <= tol) {
      converged = true;
      break;
    }
    if (omega == Complex(0.0)) {
      if (restarted) break;
      restarted = true;
      r_hat = r;
      p.setZero();
      v.setZero();
      rho = alpha = omega = Complex(1.0);
    }
  }

  // the recursive residual can drift from the true one; report the latter
  if (!converged) x = x_best;
  local.iterations = it;
  local.residual = relative_residual(a, x, b);
  local.converged = converged && local.residual <= 10.0 * tol;
  local.seconds = seconds_since(start);
  if (stats) *stats = local;
  return x;
}

Eigen::VectorXcd reconstruct_interior(const Discretization& disc, const std::vector<CondensedElement>& condensed,
                                      const Eigen::VectorXcd& skeleton) {
  const auto ni = Eigen::Index(disc.interior_dim());
  Eigen::VectorXcd volume(ni * Eigen::Index(condensed.size()));
  for (std::size_t e = 0; e < condensed.size(); ++e) {
    const CondensedElement& ce = condensed[e];
    Eigen::VectorXcd xf(Eigen::Index(ce.skeleton_dofs.size()));
    for (std::size_t i = 0; i < ce.skeleton_dofs.size(); ++i) xf(Eigen::Index(i)) = skeleton(ce.skeleton_dofs[i]);
    volume.segment(Eigen::Index(e) * ni, ni) = ce.recovery_rhs - ce.recovery * xf;
  }
  return volume;
}

SkeletonSystem assemble_monolithic(const Discretization& disc, const std::vector<ElementBlocks>& blocks) {
  const auto ni = Eigen::Index(disc.interior_dim());
  const auto nv = Eigen::Index(disc.volume_dim());
  const auto n = nv + Eigen::Index(disc.skeleton_dim());
  SkeletonSystem sys;
  sys.rhs = Eigen::VectorXcd::Zero(n);
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t e = 0; e < blocks.size(); ++e) {
    const ElementBlocks& b = blocks[e];
    std::vector<Eigen::Index> dofs;
    for (Eigen::Index i = 0; i < ni; ++i) dofs.push_back(Eigen::Index(e) * ni + i);
    for (Eigen::Index d : disc.element_skeleton_dofs(e)) dofs.push_back(nv + d);
    Eigen::MatrixXcd local(b.a_ii.rows() + b.a_fi.rows(), b.a_ii.cols() + b.a_if.cols());
    local << b.a_ii, b.a_if, b.a_fi, b.a_ff;
    Eigen::VectorXcd rhs(local.rows());
    rhs << b.rhs_i, b.rhs_f;
    for (Eigen::Index i = 0; i < local.rows(); ++i) {
      sys.rhs(dofs[std::size_t(i)]) += rhs(i);
      for (Eigen::Index j = 0; j < local.cols(); ++j)
        if (local(i, j) != Complex(0.0)) triplets.emplace_back(dofs[std::size_t(i)], dofs[std::size_t(j)], local(i, j));
    }
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

Solution solve_monolithic(const Discretization& disc, const std::vector<ElementBlocks>& blocks) {
  const SkeletonSystem sys = assemble_monolithic(disc, blocks);
  const Eigen::VectorXcd x = sparse_lu_solve(sys.matrix, sys.rhs);
  const auto nv = Eigen::Index(disc.volume_dim());
  return {x.head(nv), x.tail(x.size() - nv)};
}

Solution solve(const Discretization& disc, const ProblemData& data, const SolveOptions& options,
               SolverStats* stats) {
  const auto start = Clock::now();
  const CondensedProblem condensed = condense(disc, data);
  Solution sol;
  SolverStats local;
  if (options.kind == SolverKind::direct) {
    sol.skeleton = solve_direct(condensed.system, &local);
  } else {
    const BlockGaussSeidel precond(condensed.system.matrix, build_vertex_patch_blocks(disc), options.sweep);
    sol.skeleton = solve_bicgstab(condensed.system, precond, options.tol, options.max_iter, &local);
  }
  sol.volume = reconstruct_interior(disc, condensed.elements, sol.skeleton);
  local.seconds = seconds_since(start);
  if (stats) *stats = local;
  return sol;
}

}  // namespace hdg
