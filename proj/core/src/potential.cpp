#include "gapgraph/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

std::vector<double> merged_breakpoints(std::vector<double> a, const std::vector<double>& b, double len) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  const double eps = 1e-13 * len;
  for (double x : a) {
    if (out.empty() || x - out.back() > eps) out.push_back(x);
  }
  out.front() = 0.0;
  out.back() = len;
  return out;
}

// Lower envelope of a few linear functions on [lo, hi], given every point
// where the minimizer can switch.
std::vector<Piece> envelope_pieces(std::vector<double> cuts, double lo, double hi,
                                   const auto& value) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::erase_if(cuts, [&](double c) { return !(c >= lo && c <= hi); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= 1e-14 * (1.0 + hi); }),
             cuts.end());
  cuts.front() = lo;
  cuts.back() = hi;
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    pieces.push_back({cuts[i], cuts[i + 1], value(cuts[i]), value(cuts[i + 1])});
  return pieces;
}

}  // namespace

Potential Potential::constant(const MetricGraph& g, double c) {
  Potential q;
  for (const auto& e : g.edges()) {
    q.lengths_.push_back(e.length);
    q.pieces_.push_back({{0.0, e.length, c, c}});
  }
  return q;
}

Potential Potential::from_pieces(const MetricGraph& g, std::vector<std::vector<Piece>> pieces) {
  std::vector<double> lengths;
  for (const auto& e : g.edges()) lengths.push_back(e.length);
  return from_pieces(std::move(lengths), std::move(pieces));
}

Potential Potential::from_pieces(std::vector<double> lengths, std::vector<std::vector<Piece>> pieces) {
  if (pieces.size() != lengths.size())
    throw Error(ErrorCode::InvalidPotential, "expected pieces for " + std::to_string(lengths.size()) +
                                                 " edges, got " + std::to_string(pieces.size()));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double len = lengths[i];
    const std::string where = "edge " + std::to_string(i);
    auto& list = pieces[i];
    if (list.empty()) throw Error(ErrorCode::InvalidPotential, where + " has no pieces");
    const double eps = 1e-12 * len;
    if (std::abs(list.front().s0) > eps || std::abs(list.back().s1 - len) > eps)
      throw Error(ErrorCode::InvalidPotential, "pieces on " + where + " do not span the edge");
    list.front().s0 = 0.0;
    list.back().s1 = len;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (k > 0) {
        if (std::abs(list[k].s0 - list[k - 1].s1) > eps)
          throw Error(ErrorCode::InvalidPotential, "gap between pieces on " + where);
        list[k].s0 = list[k - 1].s1;
      }
      if (!(list[k].s1 > list[k].s0))
        throw Error(ErrorCode::InvalidPotential, "breakpoints on " + where + " are not strictly increasing");
      if (!std::isfinite(list[k].v0) || !std::isfinite(list[k].v1))
        throw Error(ErrorCode::InvalidPotential, "non-finite value on " + where);
    }
  }
  Potential q;
  q.lengths_ = std::move(lengths);
  q.pieces_ = std::move(pieces);
  return q;
}

std::vector<double> Potential::breakpoints(EdgeId e) const {
  std::vector<double> out{0.0};
  for (const auto& p : pieces(e)) out.push_back(p.s1);
  return out;
}

double Potential::right_limit(EdgeId e, double s) const {
  const auto& list = pieces_.at(index(e));
  auto it = std::upper_bound(list.begin(), list.end(), s, [](double x, const Piece& p) { return x < p.s1; });
  if (it == list.end()) return list.back().v1;
  return it->at(std::max(s, it->s0));
}

double Potential::left_limit(EdgeId e, double s) const {
  const auto& list = pieces_.at(index(e));
  auto it = std::lower_bound(list.begin(), list.end(), s, [](const Piece& p, double x) { return p.s1 < x; });
  if (it == list.end()) return list.back().v1;
  if (s <= it->s0) return it->v0;
  return it->at(s);
}

double Potential::eval(PointOnGraph x) const {
  if (index(x.edge) >= pieces_.size())
    throw Error(ErrorCode::UnknownEdge, "edge index " + std::to_string(index(x.edge)));
  const double len = lengths_[index(x.edge)];
  if (!(x.s >= 0.0 && x.s <= len)) throw Error(ErrorCode::InvalidPoint, "coordinate outside edge");
  return right_limit(x.edge, x.s);
}

double Potential::min_value() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& list : pieces_)
    for (const auto& p : list) m = std::min({m, p.v0, p.v1});
  return m;
}

double Potential::max_value() const noexcept {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& list : pieces_)
    for (const auto& p : list) m = std::max({m, p.v0, p.v1});
  return m;
}

double Potential::sup_norm() const noexcept { return std::max(std::abs(min_value()), std::abs(max_value())); }

double Potential::integral() const noexcept {
  double total = 0.0;
  for (const auto& list : pieces_)
    for (const auto& p : list) total += 0.5 * (p.v0 + p.v1) * (p.s1 - p.s0);
  return total;
}

Potential Potential::simplified(double tol) const {
  Potential out;
  out.lengths_ = lengths_;
  for (const auto& list : pieces_) {
    std::vector<Piece> merged;
    for (const auto& p : list) {
      if (!merged.empty()) {
        Piece& last = merged.back();
        const double joined_slope = (p.v1 - last.v0) / (p.s1 - last.s0);
        const bool continuous = std::abs(p.v0 - last.v1) <= tol;
        const bool collinear = std::abs(last.v0 + joined_slope * (last.s1 - last.s0) - last.v1) <= tol &&
                               std::abs(p.slope() - joined_slope) * (p.s1 - p.s0) <= tol;
        if (continuous && collinear) {
          last.s1 = p.s1;
          last.v1 = p.v1;
          continue;
        }
      }
      merged.push_back(p);
    }
    out.pieces_.push_back(std::move(merged));
  }
  return out;
}

template <class Op>
Potential Potential::combine(const Potential& other, Op op) const {
  if (lengths_.size() != other.lengths_.size())
    throw Error(ErrorCode::InvalidPotential, "potentials live on different graphs");
  Potential out;
  out.lengths_ = lengths_;
  for (std::size_t i = 0; i < lengths_.size(); ++i) {
    const EdgeId e{i};
    const auto cuts = merged_breakpoints(breakpoints(e), other.breakpoints(e), lengths_[i]);
    std::vector<Piece> list;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      list.push_back({a, b, op(right_limit(e, a), other.right_limit(e, a)),
                      op(left_limit(e, b), other.left_limit(e, b))});
    }
    out.pieces_.push_back(std::move(list));
  }
  return out;
}

Potential Potential::operator+(const Potential& other) const {
  return combine(other, [](double a, double b) { return a + b; });
}

Potential Potential::operator-(const Potential& other) const {
  return combine(other, [](double a, double b) { return a - b; });
}

Potential Potential::operator*(double c) const {
  Potential out = *this;
  for (auto& list : out.pieces_)
    for (auto& p : list) {
      p.v0 *= c;
      p.v1 *= c;
    }
  return out;
}

Potential Potential::shifted(double c) const {
  Potential out = *this;
  for (auto& list : out.pieces_)
    for (auto& p : list) {
      p.v0 += c;
      p.v1 += c;
    }
  return out;
}

bool Potential::compatible_with(const MetricGraph& g) const noexcept {
  if (lengths_.size() != g.edge_count()) return false;
  for (std::size_t i = 0; i < lengths_.size(); ++i)
    if (std::abs(lengths_[i] - g.edges()[i].length) > 1e-12 * lengths_[i]) return false;
  return true;
}

Potential split_potential(const Potential& q, EdgeId e, double s) {
  const double len = q.edge_length(e);
  if (!(s > 0.0 && s < len)) throw Error(ErrorCode::PointAtVertex, "split point must be interior");
  std::vector<double> lengths;
  std::vector<std::vector<Piece>> all;
  std::vector<Piece> tail;
  for (std::size_t i = 0; i < q.edge_count(); ++i) {
    const auto ps = q.pieces(EdgeId{i});
    std::vector<Piece> list(ps.begin(), ps.end());
    lengths.push_back(q.edge_length(EdgeId{i}));
    if (EdgeId{i} == e) {
      std::vector<Piece> head;
      for (const auto& p : list) {
        if (p.s1 <= s) {
          head.push_back(p);
        } else if (p.s0 >= s) {
          tail.push_back({p.s0 - s, p.s1 - s, p.v0, p.v1});
        } else {
          const double mid = p.at(s);
          head.push_back({p.s0, s, p.v0, mid});
          tail.push_back({0.0, p.s1 - s, mid, p.v1});
        }
      }
      list = std::move(head);
      lengths.back() = s;
    }
    all.push_back(std::move(list));
  }
  all.push_back(std::move(tail));
  lengths.push_back(len - s);
  return Potential::from_pieces(std::move(lengths), std::move(all));
}

Potential extend_potential(const Potential& q, double pendant_length, double value) {
  if (!(pendant_length > 0.0)) throw Error(ErrorCode::NonPositiveLength, "pendant length must be positive");
  std::vector<double> lengths;
  std::vector<std::vector<Piece>> all;
  for (std::size_t i = 0; i < q.edge_count(); ++i) {
    lengths.push_back(q.edge_length(EdgeId{i}));
    all.emplace_back(q.pieces(EdgeId{i}).begin(), q.pieces(EdgeId{i}).end());
  }
  lengths.push_back(pendant_length);
  all.push_back({{0.0, pendant_length, value, value}});
  return Potential::from_pieces(std::move(lengths), std::move(all));
}

Potential indicator(const MetricGraph& g, EdgeId e, double a, double b) {
  const double len = g.edge(e).length;
  if (!(0.0 <= a && a < b && b <= len))
    throw Error(ErrorCode::InvalidPoint, "indicator interval must satisfy 0 <= a < b <= |e|");
  std::vector<std::vector<Piece>> all;
  for (const auto& edge : g.edges()) all.push_back({{0.0, edge.length, 0.0, 0.0}});
  auto& list = all[index(e)];
  list.clear();
  if (a > 0.0) list.push_back({0.0, a, 0.0, 0.0});
  list.push_back({a, b, 1.0, 1.0});
  if (b < len) list.push_back({b, len, 0.0, 0.0});
  return Potential::from_pieces(g, std::move(all));
}

Potential ramp(const MetricGraph& g, EdgeId e, double a, double b, double slope) {
  const double len = g.edge(e).length;
  if (!(0.0 <= a && a < b && b <= len))
    throw Error(ErrorCode::InvalidPoint, "ramp interval must satisfy 0 <= a < b <= |e|");
  std::vector<std::vector<Piece>> all;
  for (const auto& edge : g.edges()) all.push_back({{0.0, edge.length, 0.0, 0.0}});
  auto& list = all[index(e)];
  list.clear();
  if (a > 0.0) list.push_back({0.0, a, 0.0, 0.0});
  list.push_back({a, b, 0.0, slope * (b - a)});
  if (b < len) list.push_back({b, len, 0.0, 0.0});
  return Potential::from_pieces(g, std::move(all));
}

Potential distance_field(const MetricGraph& g, PointOnGraph x0) {
  const auto d = vertex_distances(g, x0);
  std::vector<std::vector<Piece>> all;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    const double len = e.length;
    const double du = d[index(e.from)], dw = d[index(e.to)];
    const bool here = x0.edge == EdgeId{i};
    auto value = [&](double s) {
      double v = std::min(du + s, dw + len - s);
      if (here) v = std::min(v, std::abs(s - x0.s));
      return v;
    };
    std::vector<double> cuts{(dw + len - du) / 2.0};
    if (here) {
      cuts.push_back(x0.s);
      cuts.push_back((x0.s - du) / 2.0);
      cuts.push_back((x0.s + dw + len) / 2.0);
    }
    all.push_back(envelope_pieces(cuts, 0.0, len, value));
  }
  return Potential::from_pieces(g, std::move(all)).simplified(1e-14);
}

Potential tent(const MetricGraph& g, PointOnGraph center, double halfwidth) {
  if (!(halfwidth > 0.0)) throw Error(ErrorCode::NonPositiveLength, "tent halfwidth must be positive");
  const Potential dist = distance_field(g, center);
  std::vector<std::vector<Piece>> all;
  auto f = [&](double dv) { return std::max(0.0, 1.0 - dv / halfwidth); };
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    std::vector<Piece> list;
    for (const auto& p : dist.pieces(EdgeId{i})) {
      const bool crosses = (p.v0 - halfwidth) * (p.v1 - halfwidth) < 0.0;
      if (crosses) {
        const double sc = p.s0 + (halfwidth - p.v0) / (p.v1 - p.v0) * (p.s1 - p.s0);
        list.push_back({p.s0, sc, f(p.v0), 0.0});
        list.push_back({sc, p.s1, 0.0, f(p.v1)});
      } else {
        list.push_back({p.s0, p.s1, f(p.v0), f(p.v1)});
      }
    }
    all.push_back(std::move(list));
  }
  return Potential::from_pieces(g, std::move(all)).simplified(1e-14);
}

SignedDistance signed_distance(const MetricGraph& g, PointOnGraph x0, const std::vector<int>& minus_components) {
  SignedDistance out;
  out.removal = remove_point(g, x0);
  if (out.removal.component_count < 2)
    throw Error(ErrorCode::NotDisconnecting, "removing the point leaves the graph connected");
  const std::set<int> minus(minus_components.begin(), minus_components.end());
  for (int c : minus) {
    if (c < 0 || c >= static_cast<int>(out.removal.component_count))
      throw Error(ErrorCode::InvalidPoint, "component index " + std::to_string(c) + " out of range");
  }

  const Potential dist = distance_field(g, x0);
  std::vector<std::vector<Piece>> all;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    std::vector<Piece> list(dist.pieces(EdgeId{i}).begin(), dist.pieces(EdgeId{i}).end());
    for (auto& p : list) {
      int comp = out.removal.edge_component[i];
      if (out.removal.split_edge && *out.removal.split_edge == EdgeId{i})
        comp = p.s1 <= x0.s ? out.removal.before_component : out.removal.after_component;
      if (minus.contains(comp)) {
        p.v0 = -p.v0;
        p.v1 = -p.v1;
      }
    }
    all.push_back(std::move(list));
  }
  out.sigma = Potential::from_pieces(g, std::move(all));

  // G- is an interval when it is one component without branching vertices.
  if (minus.size() == 1) {
    const int c = *minus.begin();
    const auto removed_vertex = g.vertex_at(x0);
    bool branching = false;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (removed_vertex && *removed_vertex == VertexId{v}) continue;
      bool touches = false;
      for (EdgeId eid : g.incident(VertexId{v})) {
        int comp = out.removal.edge_component[index(eid)];
        if (out.removal.split_edge && *out.removal.split_edge == eid)
          comp = g.edge(eid).from == VertexId{v} ? out.removal.before_component : out.removal.after_component;
        touches = touches || comp == c;
      }
      if (touches && g.degree(VertexId{v}) > 2) branching = true;
    }
    out.minus_is_interval = !branching;
  }
  if (g.is_tree()) out.convex_on_leaf_paths = minus.empty() || out.minus_is_interval;
  return out;
}

}  // namespace gapgraph
