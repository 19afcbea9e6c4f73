#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gapgraph::testing {

namespace {

constexpr double kPi = std::numbers::pi;

std::string name(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

}  // namespace

double neumann_eigenvalue(double L, int j) { return (j * kPi / L) * (j * kPi / L); }
double mixed_eigenvalue(double L, int j) { return ((2 * j - 1) * kPi / (2 * L)) * ((2 * j - 1) * kPi / (2 * L)); }
double dirichlet_eigenvalue(double L, int j) { return (j * kPi / L) * (j * kPi / L); }

MetricGraph interval(double L, bool dirichlet_right) {
  GraphSpec spec;
  spec.vertices = {"a", "b"};
  spec.edges = {{"e", "a", "b", L}};
  if (dirichlet_right) spec.conditions["b"] = VertexCondition::dirichlet();
  return MetricGraph::build(spec);
}

MetricGraph path_graph(const std::vector<double>& lengths) {
  GraphSpec spec;
  spec.vertices.push_back("p0");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    spec.vertices.push_back(name("p", i + 1));
    spec.edges.push_back({name("e", i), name("p", i), name("p", i + 1), lengths[i]});
  }
  return MetricGraph::build(spec);
}

MetricGraph star_graph(const std::vector<double>& lengths) {
  GraphSpec spec;
  spec.vertices.push_back("c");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    spec.vertices.push_back(name("v", i));
    spec.edges.push_back({name("e", i), "c", name("v", i), lengths[i]});
  }
  return MetricGraph::build(spec);
}

MetricGraph random_tree(std::mt19937_64& rng, std::size_t max_edges, double lo, double hi) {
  std::uniform_int_distribution<std::size_t> count(1, max_edges);
  std::uniform_real_distribution<double> len(lo, hi);
  const std::size_t n = count(rng);
  GraphSpec spec;
  spec.vertices.push_back("v0");
  for (std::size_t i = 1; i <= n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    spec.vertices.push_back(name("v", i));
    spec.edges.push_back({name("e", i), name("v", parent(rng)), name("v", i), len(rng)});
  }
  return MetricGraph::build(spec);
}

PointOnGraph random_point(std::mt19937_64& rng, const MetricGraph& g, double margin) {
  std::uniform_int_distribution<std::size_t> edge(0, g.edge_count() - 1);
  std::uniform_real_distribution<double> frac(margin, 1.0 - margin);
  const EdgeId e{edge(rng)};
  return {e, frac(rng) * g.edge(e).length};
}

Potential random_convex(std::mt19937_64& rng, const MetricGraph& g, double M) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double c0 = 0.3 * M * unif(rng);
  Potential shape = Potential::constant(g, 0.0);
  const int terms = 1 + static_cast<int>(3 * unif(rng));
  for (int i = 0; i < terms; ++i) shape = shape + distance_field(g, random_point(rng, g)) * unif(rng);
  const double top = shape.max_value();
  if (top > 0.0) shape = shape * ((0.2 + 0.8 * unif(rng)) * (M - c0) / top);
  return shape.shifted(c0);
}

Potential raised_component(const MetricGraph& g, PointOnGraph x, bool raise_after, double h) {
  const PointRemoval removal = remove_point(g, x);
  const int target = raise_after ? removal.after_component : removal.before_component;
  std::vector<std::vector<Piece>> pieces;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const double L = g.edge(EdgeId{i}).length;
    if (removal.split_edge && index(*removal.split_edge) == i) {
      const double lo = raise_after ? 0.0 : h, hi = raise_after ? h : 0.0;
      pieces.push_back({{0.0, x.s, lo, lo}, {x.s, L, hi, hi}});
    } else {
      const double v = removal.edge_component[i] == target ? h : 0.0;
      pieces.push_back({{0.0, L, v, v}});
    }
  }
  return Potential::from_pieces(g, std::move(pieces));
}

Potential random_single_well(std::mt19937_64& rng, const MetricGraph& g, double M) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double c0 = 0.3 * M * unif(rng);
  const double room = M - c0;
  if (unif(rng) < 0.5) {
    return raised_component(g, random_point(rng, g), unif(rng) < 0.5, room * (0.2 + 0.8 * unif(rng))).shifted(c0);
  }
  const PointOnGraph a = random_point(rng, g);
  Potential q = Potential::constant(g, c0);
  const int terms = 1 + static_cast<int>(2 * unif(rng));
  const double share = room / terms;
  for (int i = 0; i < terms; ++i) {
    const double r = 0.2 + 1.3 * unif(rng);
    const Potential ramp_up = Potential::constant(g, 1.0) - tent(g, a, r);  // min(1, d / r)
    q = q + ramp_up * (share * unif(rng));
  }
  return q;
}

bool brute_force_single_well(const MetricGraph& g, const Potential& q, double M, int samples_per_edge) {
  struct Sample {
    PointOnGraph x;
    double value;
    bool vertex;
  };
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const EdgeId e{i};
    const double L = g.edge(e).length;
    const auto bps = q.breakpoints(e);
    for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
      const double a = bps[p], b = bps[p + 1];
      const double eps = 1e-9 * L;
      const int n = std::max(2, static_cast<int>(samples_per_edge * (b - a) / L));
      for (int k = 0; k <= n; ++k) {
        const double s = std::clamp(a + (b - a) * k / n, a + eps, b - eps);
        // value from this piece, so jumps are seen from both sides
        const double v = q.pieces(e)[p].at(s);
        samples.push_back({{e, s}, v, false});
      }
    }
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) samples.push_back({g.point_at(VertexId{v}), 0.0, true});

  const double tol = 1e-9 * (1.0 + q.sup_norm());
  for (const auto& s : samples)
    if (!s.vertex && (s.value < -tol || s.value > M + tol)) return false;

  const std::size_t n = samples.size();
  std::vector<std::vector<double>> to_vertex(n);
  for (std::size_t i = 0; i < n; ++i) to_vertex[i] = vertex_distances(g, samples[i].x);
  auto dist = [&](std::size_t i, std::size_t j) {
    const PointOnGraph& y = samples[j].x;
    const Edge& ey = g.edge(y.edge);
    double d = std::min(to_vertex[i][index(ey.from)] + y.s, to_vertex[i][index(ey.to)] + ey.length - y.s);
    if (samples[i].x.edge == y.edge) d = std::min(d, std::abs(samples[i].x.s - y.s));
    return d;
  };
  std::vector<std::vector<double>> D(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) D[i][j] = dist(i, j);

  for (std::size_t a = 0; a < n; ++a) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      if (samples[x].vertex) continue;
      for (std::size_t y = 0; y < n && ok; ++y) {
        if (samples[y].vertex || x == y) continue;
        const bool between = D[a][y] + D[y][x] <= D[a][x] + 1e-10;
        if (between && samples[y].value > samples[x].value + tol) ok = false;
      }
    }
    if (ok) return true;
  }
  return false;
}

OneJump one_jump_oracle(const MetricGraph& g, double M, const SolveOptions& solve, int grid, int heights) {
  OneJump best;
  best.gamma = fundamental_gap(g, Potential::constant(g, 0.0), solve);
  auto consider = [&](PointOnGraph x, bool after, double h) {
    const double gam = fundamental_gap(g, raised_component(g, x, after, h), solve);
    if (gam < best.gamma) best = {gam, x, after, h};
  };
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const double L = g.edge(EdgeId{i}).length;
    for (int j = 0; j < grid; ++j)
      for (bool after : {false, true})
        for (int k = 1; k <= heights; ++k) consider({EdgeId{i}, L * (j + 0.5) / grid}, after, M * k / heights);
  }
  if (best.height == 0.0) return best;
  // local refinement around the best grid point
  const OneJump coarse = best;
  const double L = g.edge(coarse.at.edge).length;
  for (int r = 0; r < 2; ++r) {
    const double ds = L / grid / (r == 0 ? 1.0 : 8.0), dh = M / heights / (r == 0 ? 1.0 : 8.0);
    const OneJump center = best;
    for (int j = -6; j <= 6; ++j)
      for (int k = -6; k <= 6; ++k) {
        const double s = center.at.s + ds * j / 6.0;
        const double h = std::clamp(center.height + dh * k / 6.0, 0.0, M);
        if (s <= 1e-6 * L || s >= L * (1 - 1e-6) || h <= 0.0) continue;
        consider({coarse.at.edge, s}, coarse.raise_after, h);
      }
  }
  return best;
}

}  // namespace gapgraph::testing
