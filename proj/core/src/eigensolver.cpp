#include "gapgraph/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

double inf_norm(const SparseMatrix& M) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(M.rows());
  for (int j = 0; j < M.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(M, j); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double min_diagonal_ratio(const SparseMatrix& A, const SparseMatrix& B) {
  double r = std::numeric_limits<double>::infinity();
  for (int j = 0; j < A.outerSize(); ++j) r = std::min(r, A.coeff(j, j) / B.coeff(j, j));
  return r;
}

}  // namespace

Eigen::VectorXd relative_residuals(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& values,
                                   const Eigen::MatrixXd& vectors) {
  const double na = inf_norm(A), nb = inf_norm(B);
  Eigen::VectorXd out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Eigen::VectorXd x = vectors.col(i);
    const Eigen::VectorXd r = A * x - values[i] * (B * x);
    const double scale = (na + std::abs(values[i]) * nb) * x.cwiseAbs().maxCoeff();
    out[i] = scale > 0.0 ? r.cwiseAbs().maxCoeff() / scale : 0.0;
  }
  return out;
}

EigenPairs dense_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, std::size_t k) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (k > n) throw Error(ErrorCode::SolverFailure, "requested " + std::to_string(k) + " eigenpairs of a system of size " + std::to_string(n));
  const Eigen::MatrixXd Ad = Eigen::MatrixXd(A), Bd = Eigen::MatrixXd(B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Bd);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "dense generalized eigensolver failed");
  EigenPairs out;
  out.values = es.eigenvalues().head(static_cast<Eigen::Index>(k));
  out.vectors = es.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
  out.residuals = relative_residuals(A, B, out.values, out.vectors);
  return out;
}

EigenPairs lowest_eigenpairs(const SparseMatrix& A, const SparseMatrix& B, std::size_t k, const EigenOptions& options) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (k == 0) throw Error(ErrorCode::SolverFailure, "no eigenpairs requested");
  std::size_t p = std::max(2 * k, k + 8);
  if (n <= options.dense_limit || 2 * p >= n) return dense_eigenpairs(A, B, k);

  double sigma = 0.0;
  if (options.shift) {
    sigma = *options.shift;
  } else {
    const double rowsum = inf_norm(A) / std::max(1e-300, inf_norm(B));
    sigma = std::min(min_diagonal_ratio(A, B), 0.0) - 1.0 - 1e-3 * rowsum;
  }
  Eigen::SimplicialLLT<SparseMatrix> llt;
  for (int attempt = 0;; ++attempt) {
    const SparseMatrix K = A - sigma * B;
    llt.compute(K);
    if (llt.info() == Eigen::Success) break;
    if (attempt == 60) throw Error(ErrorCode::SolverFailure, "could not factor the shifted operator");
    sigma -= 2.0 * std::max(1.0, std::abs(sigma));
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_block = [&](std::size_t cols) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = unif(rng);
    return X;
  };

  Eigen::MatrixXd X = random_block(p);
  const auto kk = static_cast<Eigen::Index>(k);
  EigenPairs out;
  int since_grow = 0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd Y = llt.solve(B * X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
    Eigen::MatrixXd Ar = Q.transpose() * (A * Q);
    Eigen::MatrixXd Br = Q.transpose() * (B * Q);
    Ar = 0.5 * (Ar + Ar.transpose()).eval();
    Br = 0.5 * (Br + Br.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar, Br);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "Rayleigh-Ritz step failed");
    X = Q * es.eigenvectors();

    const Eigen::VectorXd values = es.eigenvalues().head(kk);
    const Eigen::MatrixXd vecs = X.leftCols(kk);
    const Eigen::VectorXd res = relative_residuals(A, B, values, vecs);
    out.values = values;
    out.vectors = vecs;
    out.residuals = res;
    out.iterations = it;
    if (res.maxCoeff() < options.residual_tol) return out;

    // slow convergence usually means a cluster straddling the block edge
    if (++since_grow > 60 && 2 * p < n) {
      const std::size_t extra = std::min(p, n / 2 - p);
      if (extra > 0) {
        Eigen::MatrixXd grown(X.rows(), static_cast<Eigen::Index>(p + extra));
        grown << X, random_block(extra);
        X = std::move(grown);
        p += extra;
      }
      since_grow = 0;
    }
  }
  throw Error(ErrorCode::SolverFailure,
              "subspace iteration did not converge, residual " + std::to_string(out.residuals.maxCoeff()));
}

}  // namespace gapgraph
