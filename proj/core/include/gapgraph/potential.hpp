#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gapgraph/graph.hpp"

namespace gapgraph {

/// Linear piece on [s0, s1] of one edge: value v0 at s0+, v1 at s1-.
struct Piece {
  double s0;
  double s1;
  double v0;
  double v1;

  double at(double s) const noexcept {
    return s1 == s0 ? v0 : v0 + (v1 - v0) * (s - s0) / (s1 - s0);
  }
  double slope() const noexcept { return (v1 - v0) / (s1 - s0); }
};

/// Per-edge piecewise-linear function, possibly discontinuous at interior
/// breakpoints. Point evaluation at a jump returns the right limit.
class Potential {
 public:
  Potential() = default;

  static Potential constant(const MetricGraph& g, double c);
  /// Validates that each edge's pieces tile [0, |e|] in order.
  static Potential from_pieces(const MetricGraph& g, std::vector<std::vector<Piece>> pieces);
  /// Same, against bare edge lengths.
  static Potential from_pieces(std::vector<double> lengths, std::vector<std::vector<Piece>> pieces);

  std::size_t edge_count() const noexcept { return pieces_.size(); }
  double edge_length(EdgeId e) const { return lengths_.at(index(e)); }
  std::span<const Piece> pieces(EdgeId e) const { return pieces_.at(index(e)); }

  /// Breakpoints including 0 and |e|.
  std::vector<double> breakpoints(EdgeId e) const;

  double eval(PointOnGraph x) const;
  double left_limit(EdgeId e, double s) const;
  double right_limit(EdgeId e, double s) const;

  double min_value() const noexcept;
  double max_value() const noexcept;
  double sup_norm() const noexcept;
  double integral() const noexcept;

  /// Merges continuous collinear neighbours.
  Potential simplified(double tol = 0.0) const;

  Potential operator+(const Potential& other) const;
  Potential operator-(const Potential& other) const;
  Potential operator*(double c) const;
  Potential shifted(double c) const;

  bool compatible_with(const MetricGraph& g) const noexcept;

 private:
  template <class Op>
  Potential combine(const Potential& other, Op op) const;

  std::vector<double> lengths_;
  std::vector<std::vector<Piece>> pieces_;
};

/// Restriction of q to the graph produced by insert_point_vertex(g, {e, s}).
Potential split_potential(const Potential& q, EdgeId e, double s);

/// q on the graph produced by attach_pendant_edge, constant `value` on the new edge.
Potential extend_potential(const Potential& q, double pendant_length, double value = 0.0);

Potential indicator(const MetricGraph& g, EdgeId e, double a, double b);

/// slope * (s - a) on [a, b] of edge e, zero elsewhere.
Potential ramp(const MetricGraph& g, EdgeId e, double a, double b, double slope);

/// Exact distance to x0 along the graph; piecewise linear with kinks where
/// two geodesics tie.
Potential distance_field(const MetricGraph& g, PointOnGraph x0);

/// max(0, 1 - dist(x, center) / halfwidth).
Potential tent(const MetricGraph& g, PointOnGraph center, double halfwidth);

struct SignedDistance {
  Potential sigma;
  PointRemoval removal;
  /// G- is a single component containing no branching vertex.
  bool minus_is_interval = false;
  /// Convexity on all leaf paths as predicted structurally; empty off trees.
  std::optional<bool> convex_on_leaf_paths;
};

/// +dist on G+, -dist on the components listed in `minus_components`
/// (indices as numbered by remove_point). Throws NotDisconnecting.
SignedDistance signed_distance(const MetricGraph& g, PointOnGraph x0,
                               const std::vector<int>& minus_components);

}  // namespace gapgraph
