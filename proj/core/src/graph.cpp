#include "gapgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <utility>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string unique_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.contains(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.contains(candidate)) return candidate;
  }
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

// Maximize min_i f_i(s,t) over {g_j(s,t) >= 0}; all functions affine.
// The optimum of this small LP sits at an intersection of two lines drawn
// from {f_i = f_j} and {g_j = 0}, so enumerating those is exact.
struct Affine2 {
  double c, a, b;
  double operator()(double s, double t) const { return c + a * s + b * t; }
};

struct PlanarMax {
  double value = -kInf;
  double s = 0.0;
  double t = 0.0;
};

PlanarMax maximize_min_affine(const std::vector<Affine2>& fs, const std::vector<Affine2>& region) {
  std::vector<Affine2> lines = region;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j)
      lines.push_back({fs[i].c - fs[j].c, fs[i].a - fs[j].a, fs[i].b - fs[j].b});

  PlanarMax best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Affine2& p = lines[i];
      const Affine2& q = lines[j];
      const double det = p.a * q.b - p.b * q.a;
      if (std::abs(det) < 1e-14) continue;
      const double s = (-p.c * q.b + p.b * q.c) / det;
      const double t = (-p.a * q.c + p.c * q.a) / det;
      bool feasible = true;
      for (const auto& g : region) {
        if (g(s, t) < -1e-12 * (1.0 + std::abs(g.c))) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      double v = kInf;
      for (const auto& f : fs) v = std::min(v, f(s, t));
      if (v > best.value) best = {v, s, t};
    }
  }
  return best;
}

std::vector<std::vector<double>> all_pairs_vertex_distances(const MetricGraph& g) {
  std::vector<std::vector<double>> d;
  d.reserve(g.vertex_count());
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    d.push_back(vertex_distances(g, g.point_at(VertexId{v})));
  return d;
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::PointAtVertex: return "PointAtVertex";
    case ErrorCode::NotDisconnecting: return "NotDisconnecting";
    case ErrorCode::InvalidPotential: return "InvalidPotential";
    case ErrorCode::InvalidClass: return "InvalidClass";
    case ErrorCode::MeshMisaligned: return "MeshMisaligned";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::BracketingFailure: return "BracketingFailure";
    case ErrorCode::DegenerateSecond: return "DegenerateSecond";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::NotInClass: return "NotInClass";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadFlags: return "BadFlags";
  }
  return "Unknown";
}

double Path::length() const noexcept {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.length();
  return total;
}

MetricGraph MetricGraph::build(const GraphSpec& spec) {
  MetricGraph g;
  std::map<std::string, std::size_t> vertex_index;
  for (const auto& name : spec.vertices) {
    if (!vertex_index.emplace(name, g.vertex_names_.size()).second)
      throw Error(ErrorCode::DuplicateId, "vertex '" + name + "' listed twice");
    g.vertex_names_.push_back(name);
  }
  if (g.vertex_names_.empty()) throw Error(ErrorCode::Disconnected, "graph has no vertices");
  if (spec.edges.empty()) throw Error(ErrorCode::NonPositiveLength, "graph has no edges, total length is zero");

  g.conditions_.assign(g.vertex_names_.size(), VertexCondition::standard());
  for (const auto& [name, cond] : spec.conditions) {
    auto it = vertex_index.find(name);
    if (it == vertex_index.end())
      throw Error(ErrorCode::UnknownVertex, "condition given for unknown vertex '" + name + "'");
    g.conditions_[it->second] = cond;
  }

  std::set<std::string> edge_names;
  g.incidence_.resize(g.vertex_names_.size());
  for (const auto& e : spec.edges) {
    if (!edge_names.insert(e.id).second)
      throw Error(ErrorCode::DuplicateId, "edge '" + e.id + "' listed twice");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw Error(ErrorCode::NonPositiveLength, "edge '" + e.id + "' has length " + std::to_string(e.length));
    auto from = vertex_index.find(e.from);
    auto to = vertex_index.find(e.to);
    if (from == vertex_index.end() || to == vertex_index.end())
      throw Error(ErrorCode::DanglingEndpoint, "edge '" + e.id + "' references an unknown vertex");
    const EdgeId id{g.edges_.size()};
    g.edges_.push_back({e.id, VertexId{from->second}, VertexId{to->second}, e.length});
    g.incidence_[from->second].push_back(id);
    g.incidence_[to->second].push_back(id);
  }

  DisjointSets sets(g.vertex_count());
  for (const auto& e : g.edges_) sets.unite(index(e.from), index(e.to));
  const std::size_t root = sets.find(0);
  for (std::size_t v = 1; v < g.vertex_count(); ++v) {
    if (sets.find(v) != root)
      throw Error(ErrorCode::Disconnected, "vertex '" + g.vertex_names_[v] + "' is not reachable");
  }
  return g;
}

std::optional<VertexId> MetricGraph::find_vertex(const std::string& name) const {
  auto it = std::find(vertex_names_.begin(), vertex_names_.end(), name);
  if (it == vertex_names_.end()) return std::nullopt;
  return VertexId{static_cast<std::size_t>(it - vertex_names_.begin())};
}

std::optional<EdgeId> MetricGraph::find_edge(const std::string& name) const {
  auto it = std::find_if(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.name == name; });
  if (it == edges_.end()) return std::nullopt;
  return EdgeId{static_cast<std::size_t>(it - edges_.begin())};
}

double MetricGraph::total_length() const noexcept {
  double total = 0.0;
  for (const auto& e : edges_) total += e.length;
  return total;
}

double MetricGraph::min_edge_length() const noexcept {
  double m = kInf;
  for (const auto& e : edges_) m = std::min(m, e.length);
  return m;
}

bool MetricGraph::is_tree() const noexcept {
  if (edges_.size() + 1 != vertex_names_.size()) return false;
  return std::none_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); });
}

bool MetricGraph::has_dirichlet() const noexcept {
  return std::any_of(conditions_.begin(), conditions_.end(),
                     [](const VertexCondition& c) { return c.is_dirichlet(); });
}

void MetricGraph::validate(PointOnGraph x) const {
  if (index(x.edge) >= edges_.size())
    throw Error(ErrorCode::UnknownEdge, "edge index " + std::to_string(index(x.edge)));
  const double len = edges_[index(x.edge)].length;
  if (!(x.s >= 0.0 && x.s <= len))
    throw Error(ErrorCode::InvalidPoint, "coordinate " + std::to_string(x.s) + " outside [0, " +
                                             std::to_string(len) + "]");
}

std::optional<VertexId> MetricGraph::vertex_at(PointOnGraph x) const {
  validate(x);
  const Edge& e = edges_[index(x.edge)];
  if (x.s == 0.0) return e.from;
  if (x.s == e.length) return e.to;
  return std::nullopt;
}

PointOnGraph MetricGraph::point_at(VertexId v) const {
  const auto& inc = incidence_.at(index(v));
  const Edge& e = edges_[index(inc.front())];
  return {inc.front(), e.from == v ? 0.0 : e.length};
}

GraphSpec MetricGraph::to_spec() const {
  GraphSpec spec;
  spec.vertices = vertex_names_;
  for (const auto& e : edges_)
    spec.edges.push_back({e.name, vertex_names_[index(e.from)], vertex_names_[index(e.to)], e.length});
  for (std::size_t v = 0; v < vertex_names_.size(); ++v) {
    if (conditions_[v].kind != VertexCondition::Kind::Standard) spec.conditions[vertex_names_[v]] = conditions_[v];
  }
  return spec;
}

std::vector<double> vertex_distances(const MetricGraph& g, PointOnGraph source) {
  g.validate(source);
  std::vector<double> dist(g.vertex_count(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  auto relax = [&](VertexId v, double d) {
    if (d < dist[index(v)]) {
      dist[index(v)] = d;
      queue.emplace(d, index(v));
    }
  };
  const Edge& se = g.edge(source.edge);
  relax(se.from, source.s);
  relax(se.to, se.length - source.s);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (EdgeId eid : g.incident(VertexId{v})) {
      const Edge& e = g.edge(eid);
      relax(e.from == VertexId{v} ? e.to : e.from, d + e.length);
    }
  }
  return dist;
}

double distance(const MetricGraph& g, PointOnGraph x, PointOnGraph y) {
  g.validate(y);
  const auto dist = vertex_distances(g, x);
  const Edge& ey = g.edge(y.edge);
  double d = std::min(dist[index(ey.from)] + y.s, dist[index(ey.to)] + ey.length - y.s);
  if (x.edge == y.edge) d = std::min(d, std::abs(x.s - y.s));
  return d;
}

DiameterResult diameter(const MetricGraph& g) {
  const auto d = all_pairs_vertex_distances(g);
  DiameterResult best{-kInf, {}, {}};
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    const double le = e.length;
    const std::size_t eu = index(e.from), ew = index(e.to);
    for (std::size_t j = i; j < edges.size(); ++j) {
      const Edge& f = edges[j];
      const double lf = f.length;
      const std::size_t fu = index(f.from), fw = index(f.to);
      std::vector<Affine2> fs;
      std::vector<Affine2> region;
      if (i == j) {
        // s <= t on one edge: direct, or around through both endpoints.
        fs.push_back({0.0, -1.0, 1.0});
        fs.push_back({d[eu][ew] + le, 1.0, -1.0});
        region = {{0.0, 1.0, 0.0}, {le, 0.0, -1.0}, {0.0, -1.0, 1.0}};
      } else {
        const Affine2 from_e_u{0.0, 1.0, 0.0}, from_e_w{le, -1.0, 0.0};
        const Affine2 to_f_u{0.0, 0.0, 1.0}, to_f_w{lf, 0.0, -1.0};
        auto combine = [](const Affine2& a, double mid, const Affine2& b) {
          return Affine2{a.c + mid + b.c, a.a + b.a, a.b + b.b};
        };
        fs.push_back(combine(from_e_u, d[eu][fu], to_f_u));
        fs.push_back(combine(from_e_u, d[eu][fw], to_f_w));
        fs.push_back(combine(from_e_w, d[ew][fu], to_f_u));
        fs.push_back(combine(from_e_w, d[ew][fw], to_f_w));
        region = {{0.0, 1.0, 0.0}, {le, -1.0, 0.0}, {0.0, 0.0, 1.0}, {lf, 0.0, -1.0}};
      }
      const PlanarMax m = maximize_min_affine(fs, region);
      if (m.value > best.value + 1e-13) {
        best.value = m.value;
        best.first = {EdgeId{i}, std::clamp(m.s, 0.0, le)};
        best.second = {EdgeId{j}, std::clamp(m.t, 0.0, lf)};
      }
    }
  }
  return best;
}

std::vector<VertexId> leaves(const MetricGraph& g) {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (g.degree(VertexId{v}) == 1) out.push_back(VertexId{v});
  return out;
}

Path tree_path(const MetricGraph& g, VertexId a, VertexId b) {
  if (!g.is_tree()) throw Error(ErrorCode::NotATree, "paths are only unique on trees");
  std::vector<std::optional<EdgeId>> parent(g.vertex_count());
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<VertexId> queue;
  queue.push(a);
  seen[index(a)] = true;
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop();
    for (EdgeId eid : g.incident(v)) {
      const Edge& e = g.edge(eid);
      VertexId w = e.from == v ? e.to : e.from;
      if (seen[index(w)]) continue;
      seen[index(w)] = true;
      parent[index(w)] = eid;
      queue.push(w);
    }
  }
  Path path;
  for (VertexId v = b; v != a;) {
    const Edge& e = g.edge(*parent[index(v)]);
    // walking backwards from b; segment direction is toward v
    if (e.to == v) {
      path.segments.push_back({*parent[index(v)], 0.0, e.length});
      v = e.from;
    } else {
      path.segments.push_back({*parent[index(v)], e.length, 0.0});
      v = e.to;
    }
  }
  std::reverse(path.segments.begin(), path.segments.end());
  return path;
}

std::vector<Path> leaf_paths(const MetricGraph& g) {
  if (!g.is_tree()) throw Error(ErrorCode::NotATree, "leaf paths requested on a graph with cycles");
  const auto ls = leaves(g);
  std::vector<Path> out;
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j) out.push_back(tree_path(g, ls[i], ls[j]));
  return out;
}

MetricGraph insert_point_vertex(const MetricGraph& g, PointOnGraph x, std::string name) {
  if (g.vertex_at(x)) throw Error(ErrorCode::PointAtVertex, "point coincides with a vertex");
  GraphSpec spec = g.to_spec();
  std::set<std::string> vnames(spec.vertices.begin(), spec.vertices.end());
  std::set<std::string> enames;
  for (const auto& e : spec.edges) enames.insert(e.id);

  auto& split = spec.edges[index(x.edge)];
  const std::string vname = unique_name(name.empty() ? split.id + "@" : name, vnames);
  const std::string old_to = split.to;
  const double len = split.length;
  split.to = vname;
  split.length = x.s;
  spec.vertices.push_back(vname);
  spec.edges.push_back({unique_name(split.id + "'", enames), vname, old_to, len - x.s});
  return MetricGraph::build(spec);
}

MetricGraph attach_pendant_edge(const MetricGraph& g, VertexId v, double eps, std::string name) {
  if (index(v) >= g.vertex_count()) throw Error(ErrorCode::UnknownVertex, std::to_string(index(v)));
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw Error(ErrorCode::NonPositiveLength, "pendant edge length " + std::to_string(eps));
  GraphSpec spec = g.to_spec();
  std::set<std::string> vnames(spec.vertices.begin(), spec.vertices.end());
  std::set<std::string> enames;
  for (const auto& e : spec.edges) enames.insert(e.id);
  const std::string base = name.empty() ? "pendant" : name;
  const std::string leaf = unique_name(base + "_leaf", vnames);
  spec.vertices.push_back(leaf);
  spec.edges.push_back({unique_name(base, enames), g.vertex_name(v), leaf, eps});
  return MetricGraph::build(spec);
}

PointRemoval remove_point(const MetricGraph& g, PointOnGraph x0) {
  g.validate(x0);
  const auto at_vertex = g.vertex_at(x0);
  const std::size_t ne = g.edge_count();
  // pieces: one per edge, plus an extra one for the far half of a split edge
  const std::size_t pieces = at_vertex ? ne : ne + 1;
  const std::size_t removed_node = g.vertex_count();  // virtual vertex for an interior x0
  auto piece_ends = [&](std::size_t p) -> std::pair<std::size_t, std::size_t> {
    if (!at_vertex && p == index(x0.edge)) return {index(g.edge(x0.edge).from), removed_node};
    if (!at_vertex && p == ne) return {removed_node, index(g.edge(x0.edge).to)};
    const Edge& e = g.edge(EdgeId{p});
    return {index(e.from), index(e.to)};
  };
  const std::size_t removed = at_vertex ? index(*at_vertex) : removed_node;

  DisjointSets sets(pieces);
  std::vector<std::vector<std::size_t>> at(g.vertex_count());
  for (std::size_t p = 0; p < pieces; ++p) {
    auto [a, b] = piece_ends(p);
    if (a != removed) at[a].push_back(p);
    if (b != removed && b != a) at[b].push_back(p);
  }
  for (const auto& list : at)
    for (std::size_t k = 1; k < list.size(); ++k) sets.unite(list[0], list[k]);

  // Number components by first appearance in edge order; a split edge's
  // near half precedes its far half.
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < ne; ++p) {
    order.push_back(p);
    if (!at_vertex && p == index(x0.edge)) order.push_back(ne);
  }
  std::map<std::size_t, int> label;
  for (std::size_t p : order) label.emplace(sets.find(p), static_cast<int>(label.size()));

  PointRemoval out;
  out.component_count = label.size();
  out.edge_component.assign(ne, -1);
  for (std::size_t p = 0; p < ne; ++p) out.edge_component[p] = label[sets.find(p)];
  if (!at_vertex) {
    out.split_edge = x0.edge;
    out.before_component = label[sets.find(index(x0.edge))];
    out.after_component = label[sets.find(ne)];
    out.edge_component[index(x0.edge)] = -1;
  }
  return out;
}

}  // namespace gapgraph
