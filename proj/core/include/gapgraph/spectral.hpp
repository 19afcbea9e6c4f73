#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gapgraph/eigensolver.hpp"
#include "gapgraph/graph.hpp"
#include "gapgraph/mesh.hpp"
#include "gapgraph/potential.hpp"

namespace gapgraph {

/// Nodal values per edge, aligned with Mesh::nodes.
using NodalFunction = std::vector<std::vector<double>>;

struct DofMap {
  std::vector<int> vertex_dof;                  // -1 at Dirichlet vertices
  std::vector<std::vector<int>> node_dof;       // per edge, per node; -1 where eliminated
  std::size_t size = 0;
};

struct Assembly {
  SparseMatrix A;
  SparseMatrix B;
  DofMap dofs;
};

/// Throws MeshMisaligned if a breakpoint of q is not a mesh node.
Assembly assemble(const MetricGraph& g, const Potential& q, const Mesh& mesh);

/// One discretization level.
struct SpectrumLevel {
  Mesh mesh;
  std::vector<double> eigenvalues;
  std::vector<NodalFunction> eigenfunctions;
  std::vector<double> residuals;
  int iterations = 0;
};

struct SpectrumResult {
  /// Richardson-extrapolated when `extrapolated`, otherwise the fine values.
  std::vector<double> eigenvalues;
  /// |fine - coarse| / 3 per eigenvalue; zero without extrapolation.
  std::vector<double> error_estimates;
  SpectrumLevel fine;
  std::optional<SpectrumLevel> coarse;
  bool extrapolated = false;
  double multiplicity_tol = 1e-6;

  std::size_t count() const noexcept { return eigenvalues.size(); }
  const NodalFunction& eigenfunction(std::size_t n) const { return fine.eigenfunctions.at(n); }
  /// Indices of eigenvalues within relative multiplicity_tol of eigenvalue n.
  std::vector<std::size_t> cluster(std::size_t n) const;
  double gap() const { return eigenvalues.at(1) - eigenvalues.at(0); }
};

struct SolveOptions {
  std::size_t k = 2;
  MeshOptions mesh;
  bool extrapolate = true;
  EigenOptions eigen;
  double multiplicity_tol = 1e-6;
  /// Additional forced mesh nodes, e.g. breakpoints of a perturbation.
  std::vector<PointOnGraph> extra_nodes;
};

/// Lowest k eigenpairs. With extrapolation the given mesh is the coarse level
/// and its refinement supplies eigenfunctions. Throws SolverFailure.
SpectrumResult solve_spectrum(const MetricGraph& g, const Potential& q, const SolveOptions& options = {});
SpectrumResult solve_spectrum(const MetricGraph& g, const Potential& q, const Mesh& mesh,
                              const SolveOptions& options = {});

double fundamental_gap(const MetricGraph& g, const Potential& q, const SolveOptions& options = {});

/// Value of a nodal function at a graph point, by linear interpolation.
double evaluate(const Mesh& mesh, const NodalFunction& u, PointOnGraph x);

/// Exact integral of P * u * v with u, v piecewise linear on the mesh and P
/// piecewise linear on its own breakpoints.
double weighted_integral(const Mesh& mesh, const NodalFunction& u, const NodalFunction& v, const Potential& P);

/// Exact integral of u * v.
double inner_product(const Mesh& mesh, const NodalFunction& u, const NodalFunction& v);

struct EdgeDiagnostics {
  EdgeId edge;
  /// Sign changes of u2^2 - u1^2 along the edge.
  int zeros = 0;
  /// Sign changes of u2 along the edge.
  int u2_sign_changes = 0;
  /// Zero counts of u2^2 - u1^2 on each sign-constant stretch of u2, in edge order.
  std::vector<int> component_zeros;
  /// Whether each stretch touches a leaf end of the edge.
  std::vector<bool> component_at_leaf;
  /// Sign of the discrete Wronskian u1 u2' - u2 u1' increments on each
  /// stretch: +1 nondecreasing, -1 nonincreasing, 0 mixed.
  std::vector<int> wronskian_trend;
  /// Some stretch exceeds its bound: two zeros, one at a leaf.
  bool violation = false;
};

struct Diagnostics {
  std::vector<EdgeDiagnostics> edges;
  /// Second eigenvalue is clustered, so u2 is not determined and counts are indicative only.
  bool degenerate_second = false;
  bool any_violation() const noexcept;
};

Diagnostics eigen_diagnostics(const SpectrumResult& result, const MetricGraph& g);

}  // namespace gapgraph
