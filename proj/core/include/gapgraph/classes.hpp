#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gapgraph/graph.hpp"
#include "gapgraph/potential.hpp"

namespace gapgraph {

/// Convex along every path in `paths`, with 0 <= q <= M on their union.
struct ConvexOnPaths {
  std::vector<Path> paths;
  double M = 1.0;
};

/// Single-well on the subtree spanned by `tree_edges` (all edges when empty),
/// with 0 <= q <= M.
struct SingleWell {
  std::vector<EdgeId> tree_edges;
  double M = 1.0;
};

using PotentialClass = std::variant<ConvexOnPaths, SingleWell>;

ConvexOnPaths convex_on_leaf_paths(const MetricGraph& g, double M);
SingleWell single_well(const MetricGraph& g, double M, std::vector<EdgeId> tree_edges = {});

/// Throws InvalidClass if M <= 0, paths are empty, or the edges are not a tree.
void validate_class(const MetricGraph& g, const PotentialClass& cls);

double class_bound(const PotentialClass& cls) noexcept;

/// How the bound constraint is read. ModuloConstants accepts q when some
/// shift q + c satisfies 0 <= q + c <= M, i.e. max q - min q <= M.
enum class ShiftPolicy { Literal, ModuloConstants };

double default_tolerance(const Potential& q) noexcept;

struct WellPoint {
  PointOnGraph point;
};

struct ConvexVerdict {
  bool accepted = false;
  /// (x, y, z) with y between x and z on one path and q(y) above the chord.
  std::optional<std::array<PointOnGraph, 3>> witness;
  std::string reason;
};

struct SingleWellVerdict {
  bool accepted = false;
  std::optional<WellPoint> well;
  std::string reason;
};

ConvexVerdict check_convex_on_paths(const MetricGraph& g, const Potential& q, const ConvexOnPaths& cls,
                                    std::optional<double> tol = {},
                                    ShiftPolicy policy = ShiftPolicy::Literal);

SingleWellVerdict check_single_well(const MetricGraph& g, const Potential& q, const SingleWell& cls,
                                    std::optional<double> tol = {},
                                    ShiftPolicy policy = ShiftPolicy::Literal);

bool is_member(const MetricGraph& g, const Potential& q, const PotentialClass& cls,
               std::optional<double> tol = {}, ShiftPolicy policy = ShiftPolicy::Literal);

/// Trace of q along a path: pieces in path arclength, vertex crossings
/// included as (possibly discontinuous) piece boundaries.
std::vector<Piece> restrict_to_path(const Potential& q, const Path& path);

/// Point of the graph at arclength t along a path.
PointOnGraph point_on_path(const Path& path, double t);

namespace perturb {
struct Indicator {
  EdgeId edge;
  double a;
  double b;
};
struct Tent {
  PointOnGraph center;
  double halfwidth;
};
struct Ramp {
  EdgeId edge;
  double a;
  double b;
  double slope;
};
struct Sigma {
  PointOnGraph x0;
  std::vector<int> minus_components;
};
/// Direction target - q.
struct LinearBlend {
  Potential target;
};
}  // namespace perturb

using PerturbationKind =
    std::variant<perturb::Indicator, perturb::Tent, perturb::Ramp, perturb::Sigma, perturb::LinearBlend>;

Potential make_perturbation(const MetricGraph& g, const Potential& q, const PerturbationKind& kind);

struct AdmissibleRange {
  double t_min = 0.0;
  double t_max = 0.0;

  bool positively_admissible() const noexcept { return t_max > 0.0; }
  bool admissible() const noexcept { return t_min < 0.0 && t_max > 0.0; }
};

/// Largest interval around 0 of t with q + tP in the class, by bisection on
/// the membership predicate. Unbounded directions report +-infinity.
/// Throws NotInClass if q itself fails, DegenerateRange if the interval is {0}.
AdmissibleRange admissible_range(const MetricGraph& g, const Potential& q, const Potential& P,
                                 const PotentialClass& cls, ShiftPolicy policy = ShiftPolicy::ModuloConstants,
                                 std::optional<double> tol = {});

}  // namespace gapgraph
