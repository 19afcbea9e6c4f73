#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gapgraph {

enum class VertexId : std::size_t {};
enum class EdgeId : std::size_t {};

constexpr std::size_t index(VertexId v) noexcept { return static_cast<std::size_t>(v); }
constexpr std::size_t index(EdgeId e) noexcept { return static_cast<std::size_t>(e); }

/// Vertex coupling. Standard is the Kirchhoff condition, i.e. a delta
/// coupling of strength zero; Dirichlet removes the vertex value.
struct VertexCondition {
  enum class Kind { Standard, Delta, Dirichlet };

  Kind kind = Kind::Standard;
  double alpha = 0.0;

  static VertexCondition standard() { return {}; }
  static VertexCondition delta(double a) { return {a == 0.0 ? Kind::Standard : Kind::Delta, a}; }
  static VertexCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }

  bool is_dirichlet() const noexcept { return kind == Kind::Dirichlet; }
  friend bool operator==(const VertexCondition&, const VertexCondition&) = default;
};

/// Edge e is the interval [0, length], coordinate 0 at `from`.
struct Edge {
  std::string name;
  VertexId from;
  VertexId to;
  double length;

  bool is_loop() const noexcept { return from == to; }
};

struct PointOnGraph {
  EdgeId edge;
  double s;
};

/// One traversed stretch of an edge. `enter` and `exit` are edge coordinates;
/// the segment runs forward when enter < exit.
struct PathSegment {
  EdgeId edge;
  double enter;
  double exit;

  bool forward() const noexcept { return exit >= enter; }
  double length() const noexcept { return exit >= enter ? exit - enter : enter - exit; }
};

struct Path {
  std::vector<PathSegment> segments;

  double length() const noexcept;
  bool closed = false;
};

/// Raw, unvalidated description of a graph (the JSON GraphSpec).
struct GraphSpec {
  struct EdgeSpec {
    std::string id;
    std::string from;
    std::string to;
    double length = 0.0;
  };

  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
  std::map<std::string, VertexCondition> conditions;
};

class MetricGraph {
 public:
  /// Validates the spec: positive lengths, known endpoints, unique ids,
  /// connectivity. Omitted conditions default to Standard.
  static MetricGraph build(const GraphSpec& spec);

  std::size_t vertex_count() const noexcept { return vertex_names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(index(e)); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(index(v)); }
  const VertexCondition& condition(VertexId v) const { return conditions_.at(index(v)); }

  std::optional<VertexId> find_vertex(const std::string& name) const;
  std::optional<EdgeId> find_edge(const std::string& name) const;

  /// Incident edges; a loop is listed twice.
  std::span<const EdgeId> incident(VertexId v) const { return incidence_.at(index(v)); }
  std::size_t degree(VertexId v) const { return incidence_.at(index(v)).size(); }

  double total_length() const noexcept;
  double min_edge_length() const noexcept;
  bool is_tree() const noexcept;
  bool has_dirichlet() const noexcept;

  /// The vertex a point coincides with, if it sits at an edge end.
  std::optional<VertexId> vertex_at(PointOnGraph x) const;
  PointOnGraph point_at(VertexId v) const;
  void validate(PointOnGraph x) const;

  GraphSpec to_spec() const;

 private:
  std::vector<std::string> vertex_names_;
  std::vector<VertexCondition> conditions_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incidence_;
};

/// Shortest-path distances from a point to every vertex.
std::vector<double> vertex_distances(const MetricGraph& g, PointOnGraph source);

double distance(const MetricGraph& g, PointOnGraph x, PointOnGraph y);

struct DiameterResult {
  double value = 0.0;
  PointOnGraph first{};
  PointOnGraph second{};
};

/// Exact diameter, including pairs of interior points (relevant on cycles).
DiameterResult diameter(const MetricGraph& g);

std::vector<VertexId> leaves(const MetricGraph& g);

/// Unique path between two vertices of a tree.
Path tree_path(const MetricGraph& g, VertexId a, VertexId b);

/// All leaf-to-leaf paths, one per unordered pair. Throws NotATree.
std::vector<Path> leaf_paths(const MetricGraph& g);

/// Splits the edge at an interior point. The original edge keeps [0, s] and
/// its index; the remainder is appended as a new last edge, so potentials can
/// be carried over with split_potential().
MetricGraph insert_point_vertex(const MetricGraph& g, PointOnGraph x, std::string name = {});

/// New leaf edge of length eps appended at v.
MetricGraph attach_pendant_edge(const MetricGraph& g, VertexId v, double eps, std::string name = {});

/// Connected components of G minus a point. Pieces are the whole edges not
/// containing x0, plus (for an interior x0) the two halves of its edge.
struct PointRemoval {
  std::size_t component_count = 0;
  std::vector<int> edge_component;            // -1 for the split edge
  std::optional<EdgeId> split_edge;
  int before_component = -1;                  // [0, s) of the split edge
  int after_component = -1;                   // (s, |e|] of the split edge
};

PointRemoval remove_point(const MetricGraph& g, PointOnGraph x0);

}  // namespace gapgraph
