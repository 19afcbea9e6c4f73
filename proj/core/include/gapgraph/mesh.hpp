#pragma once

#include <span>
#include <vector>

#include "gapgraph/graph.hpp"
#include "gapgraph/potential.hpp"

namespace gapgraph {

/// Elements per edge: clamp(max(min_per_edge, ceil(per_shortest * |e| / min|e|)), max_per_edge).
struct MeshOptions {
  std::size_t min_per_edge = 64;
  std::size_t per_shortest = 64;
  std::size_t max_per_edge = 4096;
};

/// Per-edge node coordinates, 0 = x_0 < ... < x_n = |e|.
struct Mesh {
  std::vector<std::vector<double>> nodes;

  std::size_t edge_count() const noexcept { return nodes.size(); }
  std::size_t elements(EdgeId e) const { return nodes.at(index(e)).size() - 1; }
  std::size_t total_elements() const noexcept;
  /// Every element halved.
  Mesh refined() const;
};

/// Nearly uniform mesh with forced nodes at the breakpoints of every listed
/// potential and at the extra points. Each stretch between forced nodes gets
/// a share of elements proportional to its length, at least one.
Mesh build_mesh(const MetricGraph& g, std::span<const Potential* const> honor = {},
                const MeshOptions& options = {}, std::span<const PointOnGraph> extra = {});

Mesh build_mesh(const MetricGraph& g, const Potential& q, const MeshOptions& options = {});

/// True when every breakpoint of q sits on a node (relative tolerance on |e|).
bool aligned(const Mesh& mesh, const Potential& q, double rel_tol = 1e-12);

}  // namespace gapgraph
