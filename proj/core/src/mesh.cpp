#include "gapgraph/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "gapgraph/error.hpp"

namespace gapgraph {

std::size_t Mesh::total_elements() const noexcept {
  std::size_t n = 0;
  for (const auto& e : nodes) n += e.size() - 1;
  return n;
}

Mesh Mesh::refined() const {
  Mesh out;
  for (const auto& xs : nodes) {
    std::vector<double> fine;
    fine.reserve(2 * xs.size() - 1);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      fine.push_back(xs[i]);
      fine.push_back(0.5 * (xs[i] + xs[i + 1]));
    }
    fine.push_back(xs.back());
    out.nodes.push_back(std::move(fine));
  }
  return out;
}

Mesh build_mesh(const MetricGraph& g, std::span<const Potential* const> honor, const MeshOptions& options,
                std::span<const PointOnGraph> extra) {
  const double shortest = g.min_edge_length();
  Mesh mesh;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const double len = g.edges()[i].length;
    const auto scaled = static_cast<std::size_t>(std::ceil(options.per_shortest * len / shortest - 1e-9));
    const std::size_t target =
        std::min(std::max(options.min_per_edge, scaled), std::max<std::size_t>(options.max_per_edge, 1));

    std::vector<double> forced{0.0, len};
    for (const Potential* q : honor) {
      if (!q->compatible_with(g)) throw Error(ErrorCode::InvalidPotential, "potential does not match the graph");
      const auto bps = q->breakpoints(EdgeId{i});
      forced.insert(forced.end(), bps.begin(), bps.end());
    }
    for (const auto& x : extra)
      if (index(x.edge) == i) forced.push_back(x.s);
    std::sort(forced.begin(), forced.end());
    std::vector<double> cuts;
    for (double x : forced)
      if (cuts.empty() || x - cuts.back() > 1e-12 * len) cuts.push_back(x);
    cuts.back() = len;

    std::vector<double> xs{0.0};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(target * (b - a) / len)));
      for (std::size_t j = 1; j <= m; ++j) xs.push_back(j == m ? b : a + (b - a) * static_cast<double>(j) / m);
    }
    mesh.nodes.push_back(std::move(xs));
  }
  return mesh;
}

Mesh build_mesh(const MetricGraph& g, const Potential& q, const MeshOptions& options) {
  const Potential* list[] = {&q};
  return build_mesh(g, list, options);
}

bool aligned(const Mesh& mesh, const Potential& q, double rel_tol) {
  if (mesh.edge_count() != q.edge_count()) return false;
  for (std::size_t i = 0; i < q.edge_count(); ++i) {
    const auto& xs = mesh.nodes[i];
    const double tol = rel_tol * q.edge_length(EdgeId{i});
    if (std::abs(xs.back() - q.edge_length(EdgeId{i})) > tol) return false;
    for (double b : q.breakpoints(EdgeId{i})) {
      auto it = std::lower_bound(xs.begin(), xs.end(), b - tol);
      if (it == xs.end() || std::abs(*it - b) > tol) return false;
    }
  }
  return true;
}

}  // namespace gapgraph
