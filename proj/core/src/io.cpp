#include "gapgraph/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gapgraph/error.hpp"

namespace gapgraph {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + " is missing \"" + key + "\"");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where + " must be a string");
  return j.get<std::string>();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json level_elements(const Mesh& mesh, const MetricGraph& g) {
  json out = json::object();
  for (std::size_t i = 0; i < g.edge_count(); ++i) out[g.edges()[i].name] = mesh.elements(EdgeId{i});
  return out;
}

}  // namespace

GraphSpec graph_spec_from_json(const json& j) {
  GraphSpec spec;
  if (!j.is_object()) bad("graph file must hold an object");
  const json& edges = field(j, "edges", "graph");
  if (!edges.is_array()) bad("\"edges\" must be an array");
  if (auto it = j.find("vertices"); it != j.end()) {
    if (!it->is_array()) bad("\"vertices\" must be an array");
    for (const auto& v : *it) spec.vertices.push_back(text(v, "vertex name"));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    spec.edges.push_back({text(field(e, "id", where), where + ".id"), text(field(e, "from", where), where + ".from"),
                          text(field(e, "to", where), where + ".to"),
                          number(field(e, "length", where), where + ".length")});
  }
  if (spec.vertices.empty()) {
    // implied by the edges, in order of first mention
    for (const auto& e : spec.edges)
      for (const auto* name : {&e.from, &e.to})
        if (std::find(spec.vertices.begin(), spec.vertices.end(), *name) == spec.vertices.end())
          spec.vertices.push_back(*name);
  }
  if (auto it = j.find("conditions"); it != j.end()) {
    if (!it->is_object()) bad("\"conditions\" must be an object");
    for (const auto& [name, c] : it->items()) {
      const std::string where = "conditions." + name;
      const std::string type = text(field(c, "type", where), where + ".type");
      if (type == "standard") {
        spec.conditions[name] = VertexCondition::standard();
      } else if (type == "dirichlet") {
        spec.conditions[name] = VertexCondition::dirichlet();
      } else if (type == "delta") {
        spec.conditions[name] = VertexCondition::delta(number(field(c, "alpha", where), where + ".alpha"));
      } else {
        bad(where + ".type must be standard, dirichlet or delta");
      }
    }
  }
  return spec;
}

json to_json(const GraphSpec& spec) {
  json j;
  j["vertices"] = spec.vertices;
  j["edges"] = json::array();
  for (const auto& e : spec.edges) j["edges"].push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", e.length}});
  j["conditions"] = json::object();
  for (const auto& [name, c] : spec.conditions) {
    switch (c.kind) {
      case VertexCondition::Kind::Standard: j["conditions"][name] = {{"type", "standard"}}; break;
      case VertexCondition::Kind::Dirichlet: j["conditions"][name] = {{"type", "dirichlet"}}; break;
      case VertexCondition::Kind::Delta: j["conditions"][name] = {{"type", "delta"}, {"alpha", c.alpha}}; break;
    }
  }
  return j;
}

Potential potential_from_json(const MetricGraph& g, const json& blocks) {
  if (!blocks.is_array()) bad("\"potential\" must be an array of edge blocks");
  std::vector<std::vector<Piece>> all;
  for (const auto& e : g.edges()) all.push_back({{0.0, e.length, 0.0, 0.0}});
  std::vector<char> seen(g.edge_count(), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string where = "potential[" + std::to_string(b) + "]";
    const json& block = blocks[b];
    const std::string name = text(field(block, "edge", where), where + ".edge");
    const auto eid = g.find_edge(name);
    if (!eid) throw Error(ErrorCode::UnknownEdge, "potential refers to unknown edge " + name);
    if (seen[index(*eid)]) throw Error(ErrorCode::InvalidPotential, "edge " + name + " has two potential blocks");
    seen[index(*eid)] = 1;
    const double len = g.edge(*eid).length;

    const json& bj = field(block, "breakpoints", where);
    const json& vj = field(block, "values", where);
    if (!bj.is_array() || !vj.is_array()) bad(where + " breakpoints and values must be arrays");
    if (bj.size() != vj.size()) bad(where + " has " + std::to_string(bj.size()) + " breakpoints but " +
                                    std::to_string(vj.size()) + " values");
    if (bj.size() < 2) throw Error(ErrorCode::InvalidPotential, where + " needs at least two breakpoints");
    std::vector<double> xs, left, right;
    for (std::size_t k = 0; k < bj.size(); ++k) {
      xs.push_back(number(bj[k], where + ".breakpoints"));
      left.push_back(number(vj[k], where + ".values"));
    }
    right = left;
    if (std::abs(xs.front()) > 1e-9 * len || std::abs(xs.back() - len) > 1e-9 * len)
      throw Error(ErrorCode::InvalidPotential, where + " breakpoints must run from 0 to the edge length");
    xs.front() = 0.0;
    xs.back() = len;
    if (auto it = block.find("jumps"); it != block.end()) {
      if (!it->is_array()) bad(where + ".jumps must be an array");
      for (const auto& jump : *it) {
        const double at = number(field(jump, "at", where + ".jumps"), where + ".jumps.at");
        std::size_t k = 1;
        while (k + 1 < xs.size() && std::abs(xs[k] - at) > 1e-12 * len) ++k;
        if (k + 1 >= xs.size()) throw Error(ErrorCode::InvalidPotential, where + " jump is not at an interior breakpoint");
        left[k] = number(field(jump, "left", where + ".jumps"), where + ".jumps.left");
        right[k] = number(field(jump, "right", where + ".jumps"), where + ".jumps.right");
      }
    }
    std::vector<Piece> list;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) list.push_back({xs[k], xs[k + 1], right[k], left[k + 1]});
    all[index(*eid)] = std::move(list);
  }
  return Potential::from_pieces(g, std::move(all));
}

json to_json(const MetricGraph& g, const Potential& q) {
  json out = json::array();
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto ps = q.pieces(EdgeId{i});
    json bps = json::array(), vals = json::array(), jumps = json::array();
    bps.push_back(0.0);
    vals.push_back(ps.front().v0);
    for (std::size_t k = 0; k < ps.size(); ++k) {
      bps.push_back(ps[k].s1);
      vals.push_back(ps[k].v1);
      if (k + 1 < ps.size() && ps[k + 1].v0 != ps[k].v1)
        jumps.push_back({{"at", ps[k].s1}, {"left", ps[k].v1}, {"right", ps[k + 1].v0}});
    }
    out.push_back({{"edge", g.edges()[i].name}, {"breakpoints", bps}, {"values", vals}, {"jumps", jumps}});
  }
  return out;
}

json to_json(PointOnGraph x, const MetricGraph& g) { return {{"edge", g.edge(x.edge).name}, {"s", x.s}}; }

PointOnGraph point_from_json(const MetricGraph& g, const json& j) {
  const std::string name = text(field(j, "edge", "point"), "point.edge");
  const auto eid = g.find_edge(name);
  if (!eid) throw Error(ErrorCode::UnknownEdge, "unknown edge " + name);
  const PointOnGraph x{*eid, number(field(j, "s", "point"), "point.s")};
  g.validate(x);
  return x;
}

Problem parse_problem(std::string_view input) {
  json j;
  try {
    j = json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, input.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (input[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    bad("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  Problem p;
  p.spec = graph_spec_from_json(j);
  p.graph = MetricGraph::build(p.spec);
  if (auto it = j.find("potential"); it != j.end()) {
    p.potential = potential_from_json(p.graph, *it);
    p.has_potential = true;
  } else {
    p.potential = Potential::constant(p.graph, 0.0);
  }
  if (auto it = j.find("perturbation"); it != j.end()) p.perturbation = potential_from_json(p.graph, *it);
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

json to_json(const SpectrumResult& r, const MetricGraph& g, bool with_functions) {
  json j;
  j["eigenvalues"] = r.eigenvalues;
  j["error_estimates"] = r.error_estimates;
  j["residuals"] = r.fine.residuals;
  j["extrapolated"] = r.extrapolated;
  j["multiplicity_tol"] = r.multiplicity_tol;
  j["gap"] = r.count() >= 2 ? json(r.gap()) : json(nullptr);
  j["mesh"] = {{"fine", level_elements(r.fine.mesh, g)}};
  if (r.coarse) j["mesh"]["coarse"] = level_elements(r.coarse->mesh, g);
  if (with_functions) {
    json fns = json::array();
    for (std::size_t n = 0; n < r.count(); ++n) {
      json edges = json::object();
      for (std::size_t i = 0; i < g.edge_count(); ++i)
        edges[g.edges()[i].name] = {{"nodes", r.fine.mesh.nodes[i]}, {"values", r.eigenfunction(n)[i]}};
      fns.push_back({{"index", n + 1}, {"edges", edges}});
    }
    j["eigenfunctions"] = fns;
  }
  return j;
}

json to_json(const Diagnostics& d, const MetricGraph& g) {
  json edges = json::array();
  for (const auto& e : d.edges)
    edges.push_back({{"edge", g.edge(e.edge).name},
                     {"zeros", e.zeros},
                     {"u2_sign_changes", e.u2_sign_changes},
                     {"component_zeros", e.component_zeros},
                     {"component_at_leaf", e.component_at_leaf},
                     {"wronskian_trend", e.wronskian_trend},
                     {"violation", e.violation}});
  return {{"edges", edges}, {"degenerate_second", d.degenerate_second}, {"violation", d.any_violation()}};
}

json to_json(const AdmissibleRange& r) {
  return {{"t_min", number_or_null(r.t_min)}, {"t_max", number_or_null(r.t_max)}};
}

json to_json(const FHReport& r) {
  json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["direction"] = std::string(to_string(r.direction));
  j["integral"] = r.integral;
  j["matrix"] = r.matrix.entries;
  j["matrix_eigenvalues"] = r.matrix.eigenvalues;
  j["multiplicity"] = r.multiplicity;
  j["error_estimate"] = r.error_estimate;
  j["margin"] = r.margin;
  j["normalization"] = r.normalization;
  j["admissible_range"] = r.range ? to_json(*r.range) : json(nullptr);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json to_json(const OptimizationResult& r, const MetricGraph& g) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"evaluation", t.evaluation}, {"restart", t.restart}, {"gamma", t.gamma}});
  json breaks = json::object();
  for (std::size_t i = 0; i < r.realized_breaks.size(); ++i) breaks[g.edges()[i].name] = r.realized_breaks[i];
  return {{"q_star", to_json(g, r.q_star)},
          {"theta", r.theta},
          {"gamma_star", r.gamma_star},
          {"gamma_search", r.gamma_search},
          {"direction", std::string(to_string(r.direction))},
          {"trace", trace},
          {"evaluations", r.evaluations},
          {"converged", r.converged},
          {"multiplicity_at_opt", r.multiplicity_at_opt},
          {"realized_breaks", breaks}};
}

json to_json(const StationarityReport& r) {
  json j{{"passed", r.passed}, {"probes", r.probes}, {"admissible", r.admissible}};
  if (r.worst) {
    j["worst"] = {{"probe", r.worst->description},
                  {"value", r.worst->value},
                  {"allowed", r.worst->margin},
                  {"range", to_json(r.worst->range)},
                  {"violation", r.worst->violation}};
  } else {
    j["worst"] = nullptr;
  }
  return j;
}

json to_json(const ConstantProbeReport& r, const MetricGraph& g) {
  json leaf = json::array();
  for (const auto& w : r.leaf_small)
    leaf.push_back({{"leaf", g.vertex_name(w.leaf)}, {"value", w.value}, {"average", w.average}});
  json sig = json::array();
  for (const auto& w : r.sigma_witnesses)
    sig.push_back({{"x0", to_json(w.x0, g)}, {"integral", w.integral}, {"margin", w.margin}});
  return {{"leaf_small", leaf},
          {"vanishing_edge", r.vanishing_edge},
          {"vanishing_on", r.vanishing_on ? json(g.edge(*r.vanishing_on).name) : json(nullptr)},
          {"multiplicity", r.multiplicity},
          {"pendant_suggestion", r.pendant_suggestion ? to_json(*r.pendant_suggestion, g) : json(nullptr)},
          {"sigma_witnesses", sig},
          {"lambda2", r.lambda2},
          {"constant_not_minimal", r.constant_not_minimal}};
}

json to_json(const BoundAudit& r) {
  return {{"diameter", r.diameter},         {"gamma", r.gamma},         {"gamma_zero", r.gamma_zero},
          {"sup_q", r.sup_q},               {"is_tree", r.is_tree},     {"upper_margin", r.upper_margin},
          {"zero_margin", r.zero_margin},   {"upper_ok", r.upper_ok},   {"zero_ok", r.zero_ok},
          {"positive", r.positive},         {"passed", r.passed()}};
}

std::string sweep_csv(const std::vector<std::array<double, 4>>& rows, const std::string& parameter) {
  std::string out = parameter + ",lambda1,lambda2,gap\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < 4; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", r[i]);
      out += buf;
      out += i == 3 ? "\n" : ",";
    }
  }
  return out;
}

}  // namespace gapgraph
