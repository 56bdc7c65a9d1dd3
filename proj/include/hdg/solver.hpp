#pragma once

#include "hdg/assembly.hpp"
#include "hdg/discretization.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace hdg {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Data kept per element after eliminating the interior unknowns.
struct CondensedElement {
  /// A_ii^{-1} A_if
  Eigen::MatrixXcd recovery;
  /// A_ii^{-1} rhs_i
  Eigen::VectorXcd recovery_rhs;
  std::vector<Eigen::Index> skeleton_dofs;
  /// Reciprocal condition estimate of A_ii.
  double rcond = 0.0;
};

struct SkeletonSystem {
  SparseMatrix matrix;
  Eigen::VectorXcd rhs;
};

struct CondensedProblem {
  std::vector<CondensedElement> elements;
  SkeletonSystem system;
};

/// Volume and skeleton coefficients of a discrete solution.
struct Solution {
  /// Element e owns interior_dim() entries starting at e * interior_dim(): [sigma | u].
  Eigen::VectorXcd volume;
  Eigen::VectorXcd skeleton;
};

struct SolverStats {
  int iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;
  bool converged = true;
};

/// Static condensation S = A_ff - A_fi A_ii^{-1} A_if scattered into the skeleton system.
/// Throws std::runtime_error naming the element if some A_ii is singular.
CondensedProblem condense(const Discretization& disc, const std::vector<ElementBlocks>& blocks);
/// Same, assembling one element at a time so the full block set is never held in memory.
CondensedProblem condense(const Discretization& disc, const ProblemData& data);

/// Sparse LU; stats.residual is ||Ax-b|| / ||b|| (0 when b = 0).
/// Throws std::runtime_error if the factorization fails.
Eigen::VectorXcd solve_direct(const SkeletonSystem& sys, SolverStats* stats = nullptr);

/// Overlapping multiplicative block Gauss-Seidel, used as a fixed linear preconditioner.
class BlockGaussSeidel {
 public:
  enum class Sweep { forward, symmetric };

  BlockGaussSeidel(const SparseMatrix& matrix, std::vector<std::vector<Eigen::Index>> blocks,
                   Sweep sweep = Sweep::forward);

  /// One sweep for A z = r starting from z = 0.
  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& r) const;
  [[nodiscard]] const std::vector<std::vector<Eigen::Index>>& blocks() const { return blocks_; }
  [[nodiscard]] Sweep sweep() const { return sweep_; }

 private:
  void relax(std::size_t b, const Eigen::VectorXcd& r, Eigen::VectorXcd& z) const;

  const SparseMatrix* matrix_;
  std::vector<std::vector<Eigen::Index>> blocks_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> factors_;
  Sweep sweep_;
};

/// One block per mesh vertex holding both facet variables of every incident facet,
/// ordered by vertex index.
std::vector<std::vector<Eigen::Index>> build_vertex_patch_blocks(const Discretization& disc);

inline constexpr double default_iterative_tolerance = 1e-5;

/// Right-preconditioned BiCGSTAB stopping on ||b - A x|| <= tol ||b||.
/// On breakdown the shadow residual is reset once; a second breakdown ends the
/// iteration with converged = false.
Eigen::VectorXcd solve_bicgstab(const SkeletonSystem& sys, const BlockGaussSeidel& precond, double tol,
                                int max_iter, SolverStats* stats = nullptr);

/// x_i = A_ii^{-1} (rhs_i - A_if x_f) per element.
Eigen::VectorXcd reconstruct_interior(const Discretization& disc, const std::vector<CondensedElement>& condensed,
                                      const Eigen::VectorXcd& skeleton);

/// Uncondensed system over [all volume unknowns | all skeleton unknowns].
SkeletonSystem assemble_monolithic(const Discretization& disc, const std::vector<ElementBlocks>& blocks);
/// Sparse LU of the uncondensed system; the reference route for condensation checks.
Solution solve_monolithic(const Discretization& disc, const std::vector<ElementBlocks>& blocks);

enum class SolverKind { direct, bicgstab };

struct SolveOptions {
  SolverKind kind = SolverKind::direct;
  double tol = default_iterative_tolerance;
  int max_iter = 5000;
  BlockGaussSeidel::Sweep sweep = BlockGaussSeidel::Sweep::forward;
};

/// Assemble, condense, solve the skeleton system and reconstruct the interior.
Solution solve(const Discretization& disc, const ProblemData& data, const SolveOptions& options,
               SolverStats* stats = nullptr);

}  // namespace hdg
