#include "gapgraph/classes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

struct Bounds {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::optional<std::string> violation(double M, double tol, ShiftPolicy policy) const {
    if (policy == ShiftPolicy::ModuloConstants) {
      if (hi - lo > M + tol) return "oscillation " + std::to_string(hi - lo) + " exceeds M";
      return std::nullopt;
    }
    if (lo < -tol) return "value " + std::to_string(lo) + " below 0";
    if (hi > M + tol) return "value " + std::to_string(hi) + " above M";
    return std::nullopt;
  }
};

std::vector<EdgeId> tree_edge_list(const MetricGraph& g, const SingleWell& cls) {
  if (!cls.tree_edges.empty()) return cls.tree_edges;
  std::vector<EdgeId> all;
  for (std::size_t i = 0; i < g.edge_count(); ++i) all.push_back(EdgeId{i});
  return all;
}

// Values along one edge stretch, walked in the given direction.
std::vector<std::pair<double, double>> directed_values(const Potential& q, EdgeId e, double lo, double hi,
                                                       bool increasing) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : q.pieces(e)) {
    const double a = std::max(p.s0, lo), b = std::min(p.s1, hi);
    if (b <= a) continue;
    out.emplace_back(p.at(a), p.at(b));
  }
  if (!increasing) {
    std::reverse(out.begin(), out.end());
    for (auto& [x, y] : out) std::swap(x, y);
  }
  return out;
}

struct Oriented {
  EdgeId edge;
  double lo;
  double hi;
  bool increasing;   // walking toward the well means increasing s
  VertexId child;    // vertex at the far end from the well
  std::optional<VertexId> parent;  // vertex at the near end; empty when it is the well point
};

bool nonincreasing(const std::vector<std::pair<double, double>>& vals, double tol) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].second > vals[i].first + tol) return false;
    if (i > 0 && vals[i].first > vals[i - 1].second + tol) return false;
  }
  return true;
}

}  // namespace

ConvexOnPaths convex_on_leaf_paths(const MetricGraph& g, double M) { return {leaf_paths(g), M}; }

SingleWell single_well(const MetricGraph& g, double M, std::vector<EdgeId> tree_edges) {
  SingleWell cls{std::move(tree_edges), M};
  validate_class(g, cls);
  return cls;
}

double class_bound(const PotentialClass& cls) noexcept {
  return std::visit([](const auto& c) { return c.M; }, cls);
}

void validate_class(const MetricGraph& g, const PotentialClass& cls) {
  if (!(class_bound(cls) > 0.0)) throw Error(ErrorCode::InvalidClass, "bound M must be positive");
  if (const auto* c = std::get_if<ConvexOnPaths>(&cls)) {
    if (c->paths.empty()) throw Error(ErrorCode::InvalidClass, "no paths given");
    for (const auto& path : c->paths) {
      for (const auto& seg : path.segments) {
        if (index(seg.edge) >= g.edge_count()) throw Error(ErrorCode::InvalidClass, "path uses unknown edge");
        const double len = g.edge(seg.edge).length;
        if (seg.enter < 0.0 || seg.enter > len || seg.exit < 0.0 || seg.exit > len)
          throw Error(ErrorCode::InvalidClass, "path segment leaves its edge");
      }
    }
    return;
  }
  const auto& sw = std::get<SingleWell>(cls);
  if (sw.tree_edges.empty()) {
    if (!g.is_tree()) throw Error(ErrorCode::InvalidClass, "graph is not a tree; give the subtree explicitly");
    return;
  }
  std::set<std::size_t> seen;
  std::vector<std::size_t> parent(g.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::set<std::size_t> verts;
  for (EdgeId e : sw.tree_edges) {
    if (index(e) >= g.edge_count()) throw Error(ErrorCode::InvalidClass, "subtree uses unknown edge");
    if (!seen.insert(index(e)).second) throw Error(ErrorCode::InvalidClass, "subtree lists an edge twice");
    const auto& edge = g.edge(e);
    const auto a = find(index(edge.from)), b = find(index(edge.to));
    if (a == b) throw Error(ErrorCode::InvalidClass, "subtree edges contain a cycle");
    parent[a] = b;
    verts.insert(index(edge.from));
    verts.insert(index(edge.to));
  }
  if (verts.size() != sw.tree_edges.size() + 1) throw Error(ErrorCode::InvalidClass, "subtree is not connected");
}

double default_tolerance(const Potential& q) noexcept { return 1e-10 * (1.0 + q.sup_norm()); }

std::vector<Piece> restrict_to_path(const Potential& q, const Path& path) {
  std::vector<Piece> out;
  double offset = 0.0;
  for (const auto& seg : path.segments) {
    const double lo = std::min(seg.enter, seg.exit), hi = std::max(seg.enter, seg.exit);
    if (hi <= lo) continue;
    std::vector<Piece> local;
    for (const auto& p : q.pieces(seg.edge)) {
      const double a = std::max(p.s0, lo), b = std::min(p.s1, hi);
      if (b <= a) continue;
      local.push_back({a, b, p.at(a), p.at(b)});
    }
    if (seg.forward()) {
      for (const auto& p : local) out.push_back({offset + p.s0 - lo, offset + p.s1 - lo, p.v0, p.v1});
    } else {
      for (auto it = local.rbegin(); it != local.rend(); ++it)
        out.push_back({offset + hi - it->s1, offset + hi - it->s0, it->v1, it->v0});
    }
    offset += hi - lo;
  }
  return out;
}

PointOnGraph point_on_path(const Path& path, double t) {
  if (path.segments.empty()) throw Error(ErrorCode::InvalidPoint, "empty path");
  double offset = 0.0;
  for (const auto& seg : path.segments) {
    const double len = seg.length();
    if (t <= offset + len || &seg == &path.segments.back()) {
      const double u = std::clamp(t - offset, 0.0, len);
      return {seg.edge, seg.forward() ? seg.enter + u : seg.enter - u};
    }
    offset += len;
  }
  return {path.segments.back().edge, path.segments.back().exit};
}

ConvexVerdict check_convex_on_paths(const MetricGraph& g, const Potential& q, const ConvexOnPaths& cls,
                                    std::optional<double> tol_opt, ShiftPolicy policy) {
  const double tol = tol_opt.value_or(default_tolerance(q));
  ConvexVerdict verdict;
  Bounds bounds;
  (void)g;
  for (const auto& path : cls.paths) {
    const auto trace = restrict_to_path(q, path);
    for (const auto& p : trace) {
      bounds.add(p.v0);
      bounds.add(p.v1);
    }
    for (std::size_t i = 1; i < trace.size(); ++i) {
      const Piece& before = trace[i - 1];
      const Piece& after = trace[i];
      const double t = after.s0;
      const double left = before.v1, right = after.v0;
      if (std::abs(right - left) > tol) {
        const double jump = std::abs(right - left);
        const double steep = std::max(std::abs(before.slope()), std::abs(after.slope())) + 1e-300;
        const double eta = std::min({0.25 * (before.s1 - before.s0), 0.25 * (after.s1 - after.s0), 0.1 * jump / steep});
        std::array<double, 3> ts = right > left ? std::array{t - eta, t + 0.5 * eta, t + eta}
                                                : std::array{t - eta, t - 0.5 * eta, t + eta};
        verdict.witness = {point_on_path(path, ts[0]), point_on_path(path, ts[1]), point_on_path(path, ts[2])};
        verdict.reason = "jump of " + std::to_string(jump) + " along a path";
        return verdict;
      }
      const double x = before.s0, z = after.s1;
      const double fy = 0.5 * (left + right);
      const double chord = before.v0 + (after.v1 - before.v0) * (t - x) / (z - x);
      if (fy > chord + tol) {
        verdict.witness = {point_on_path(path, x), point_on_path(path, t), point_on_path(path, z)};
        verdict.reason = "concave kink, excess " + std::to_string(fy - chord);
        return verdict;
      }
    }
  }
  if (auto why = bounds.violation(cls.M, tol, policy)) {
    verdict.reason = *why;
    return verdict;
  }
  verdict.accepted = true;
  return verdict;
}

SingleWellVerdict check_single_well(const MetricGraph& g, const Potential& q, const SingleWell& cls,
                                    std::optional<double> tol_opt, ShiftPolicy policy) {
  const double tol = tol_opt.value_or(default_tolerance(q));
  SingleWellVerdict verdict;
  Bounds bounds;
  for (std::size_t i = 0; i < q.edge_count(); ++i)
    for (const auto& p : q.pieces(EdgeId{i})) {
      bounds.add(p.v0);
      bounds.add(p.v1);
    }
  if (auto why = bounds.violation(cls.M, tol, policy)) {
    verdict.reason = *why;
    return verdict;
  }

  const auto tree = tree_edge_list(g, cls);
  std::vector<std::vector<EdgeId>> adj(g.vertex_count());
  std::vector<VertexId> tree_vertices;
  for (EdgeId e : tree) {
    const auto& edge = g.edge(e);
    adj[index(edge.from)].push_back(e);
    adj[index(edge.to)].push_back(e);
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (!adj[v].empty()) tree_vertices.push_back(VertexId{v});
  if (tree.empty()) {
    verdict.accepted = true;
    verdict.well = WellPoint{g.point_at(VertexId{0})};
    return verdict;
  }

  auto test = [&](std::optional<VertexId> root, std::optional<PointOnGraph> interior) {
    std::vector<Oriented> parts;
    std::queue<VertexId> frontier;
    std::vector<char> visited(g.vertex_count(), 0);
    std::optional<EdgeId> skip;
    if (root) {
      visited[index(*root)] = 1;
      frontier.push(*root);
    } else {
      const auto& edge = g.edge(interior->edge);
      const double len = edge.length;
      parts.push_back({interior->edge, 0.0, interior->s, true, edge.from, std::nullopt});
      parts.push_back({interior->edge, interior->s, len, false, edge.to, std::nullopt});
      visited[index(edge.from)] = visited[index(edge.to)] = 1;
      frontier.push(edge.from);
      frontier.push(edge.to);
      skip = interior->edge;
    }
    while (!frontier.empty()) {
      const VertexId v = frontier.front();
      frontier.pop();
      for (EdgeId e : adj[index(v)]) {
        if (skip && e == *skip) continue;
        const auto& edge = g.edge(e);
        const VertexId other = edge.from == v ? edge.to : edge.from;
        if (visited[index(other)]) continue;
        visited[index(other)] = 1;
        frontier.push(other);
        // walking from `other` toward v
        parts.push_back({e, 0.0, edge.length, edge.to == v, other, v});
      }
    }
    // start value (child end) and end value (parent end) of each part
    std::vector<std::vector<double>> arrive_at(g.vertex_count());
    std::vector<double> leave_from(g.vertex_count(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& part : parts) {
      const auto vals = directed_values(q, part.edge, part.lo, part.hi, part.increasing);
      if (!nonincreasing(vals, tol)) return false;
      if (vals.empty()) continue;
      leave_from[index(part.child)] = vals.front().first;
      if (part.parent) arrive_at[index(*part.parent)].push_back(vals.back().second);
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (std::isnan(leave_from[v])) continue;
      for (double incoming : arrive_at[v])
        if (leave_from[v] > incoming + tol) return false;
    }
    return true;
  };

  for (VertexId v : tree_vertices) {
    if (test(v, std::nullopt)) {
      verdict.accepted = true;
      verdict.well = WellPoint{g.point_at(v)};
      return verdict;
    }
  }
  for (EdgeId e : tree) {
    const auto bps = q.breakpoints(e);
    for (std::size_t k = 1; k + 1 < bps.size(); ++k) {
      const PointOnGraph a{e, bps[k]};
      if (test(std::nullopt, a)) {
        verdict.accepted = true;
        verdict.well = WellPoint{a};
        return verdict;
      }
    }
  }
  verdict.reason = "no well point makes q nonincreasing toward it";
  return verdict;
}

bool is_member(const MetricGraph& g, const Potential& q, const PotentialClass& cls, std::optional<double> tol,
               ShiftPolicy policy) {
  if (const auto* c = std::get_if<ConvexOnPaths>(&cls)) return check_convex_on_paths(g, q, *c, tol, policy).accepted;
  return check_single_well(g, q, std::get<SingleWell>(cls), tol, policy).accepted;
}

Potential make_perturbation(const MetricGraph& g, const Potential& q, const PerturbationKind& kind) {
  return std::visit(
      [&](const auto& k) -> Potential {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, perturb::Indicator>) {
          return indicator(g, k.edge, k.a, k.b);
        } else if constexpr (std::is_same_v<K, perturb::Tent>) {
          return tent(g, k.center, k.halfwidth);
        } else if constexpr (std::is_same_v<K, perturb::Ramp>) {
          return ramp(g, k.edge, k.a, k.b, k.slope);
        } else if constexpr (std::is_same_v<K, perturb::Sigma>) {
          return signed_distance(g, k.x0, k.minus_components).sigma;
        } else {
          if (!k.target.compatible_with(g)) throw Error(ErrorCode::InvalidPotential, "blend target on another graph");
          return k.target - q;
        }
      },
      kind);
}

AdmissibleRange admissible_range(const MetricGraph& g, const Potential& q, const Potential& P,
                                 const PotentialClass& cls, ShiftPolicy policy, std::optional<double> tol_opt) {
  validate_class(g, cls);
  const double tol = tol_opt.value_or(default_tolerance(q));
  if (!is_member(g, q, cls, tol, policy)) throw Error(ErrorCode::NotInClass, "base potential is not in the class");
  const double pnorm = P.sup_norm();
  AdmissibleRange range;
  if (pnorm == 0.0) {
    range.t_min = -std::numeric_limits<double>::infinity();
    range.t_max = std::numeric_limits<double>::infinity();
    return range;
  }
  // candidates are checked with a tolerance that does not grow with t, so the
  // certificate at 1.01 t_max is not absorbed by slack
  auto member = [&](double t) { return is_member(g, q + P * t, cls, tol, policy); };
  const double scale = (class_bound(cls) + q.sup_norm()) / pnorm;

  auto one_side = [&](double sign) {
    // a first step far above tol / |P|, so slack in the check cannot pass off
    // a direction that breaks the class shape as admissible
    const double probe = std::max(1e-9 * scale, 1e3 * tol / pnorm);
    if (!member(sign * probe)) return 0.0;
    double good = probe, bad = probe;
    for (int i = 0; i < 200; ++i) {
      bad *= 2.0;
      if (!member(sign * bad)) break;
      good = bad;
      if (i == 199) return std::numeric_limits<double>::infinity();
    }
    while (bad - good > 1e-13 * bad) {
      const double mid = 0.5 * (good + bad);
      (member(sign * mid) ? good : bad) = mid;
    }
    return good;
  };
  range.t_max = one_side(1.0);
  range.t_min = -one_side(-1.0);
  if (range.t_max == 0.0 && range.t_min == 0.0)
    throw Error(ErrorCode::DegenerateRange, "no nonzero t keeps q + tP in the class");
  return range;
}

}  // namespace gapgraph
