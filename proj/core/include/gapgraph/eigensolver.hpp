#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace gapgraph {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  /// Systems up to this size go straight to the dense solver.
  std::size_t dense_limit = 40;
  double residual_tol = 1e-11;
  int max_iterations = 2000;
  std::uint64_t seed = 0x5eed;
  /// Shift below the spectrum; estimated from the matrices when empty.
  std::optional<double> shift;
};

/// Lowest eigenpairs of A x = lambda B x, B symmetric positive definite.
/// Columns of `vectors` are B-orthonormal; values ascend.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  /// |A x - lambda B x|_inf / ((|A|_inf + |lambda| |B|_inf) |x|_inf)
  Eigen::VectorXd residuals;
  int iterations = 0;
};

/// Shift-invert block subspace iteration with Rayleigh-Ritz. Throws SolverFailure.
EigenPairs lowest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, std::size_t k,
                             const EigenOptions& options = {});

/// Dense generalized symmetric-definite solve of the full problem.
EigenPairs dense_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, std::size_t k);

Eigen::VectorXd relative_residuals(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& values,
                                   const Eigen::MatrixXd& vectors);

}  // namespace gapgraph
