#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "gapgraph/error.hpp"
#include "gapgraph/optimizer.hpp"

namespace gapgraph {

namespace {

std::size_t unknown_count(const MetricGraph& g, const Mesh& mesh) {
  std::size_t n = mesh.total_elements() - g.edge_count();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) n += g.condition(VertexId{v}).is_dirichlet() ? 0 : 1;
  return n;
}

}  // namespace

ConstantProbeReport constant_optimality_probe(const MetricGraph& g, double M, const SolveOptions& solve_in) {
  if (!g.is_tree()) throw Error(ErrorCode::NotATree, "constant-potential probes need a tree");
  const Potential zero = Potential::constant(g, 0.0);
  SolveOptions solve = solve_in;
  const Mesh mesh = build_mesh(g, zero, solve.mesh);
  solve.k = std::min(std::max<std::size_t>(solve.k, 3), unknown_count(g, mesh));
  const SpectrumResult spec = solve_spectrum(g, zero, mesh, solve);

  ConstantProbeReport report;
  report.lambda2 = spec.eigenvalues[1];
  const auto cluster = spec.cluster(1);
  report.multiplicity = cluster.size();
  const auto& fm = spec.fine.mesh;

  double umax = 0.0;
  for (std::size_t j : cluster)
    for (const auto& edge_vals : spec.eigenfunction(j))
      for (double x : edge_vals) umax = std::max(umax, std::abs(x));

  // leaf values against the average of u2^2
  const double L = g.total_length();
  for (VertexId v : leaves(g)) {
    if (g.condition(v).is_dirichlet()) continue;
    LeafWitness w{v, 0.0, 0.0};
    if (cluster.size() == 1) {
      const auto& u2 = spec.eigenfunction(1);
      const double val = evaluate(fm, u2, g.point_at(v));
      w.value = val * val;
      w.average = inner_product(fm, u2, u2) / L;
    } else {
      w.average = 1.0 / L;  // some unit combination vanishes at v
    }
    if (w.value < w.average - 1e-8 * (1.0 + w.average)) report.leaf_small.push_back(w);
  }

  // an eigenfunction of the cluster vanishing on a whole edge
  for (std::size_t i = 0; i < g.edge_count() && !report.vanishing_edge; ++i) {
    const auto nodes = static_cast<Eigen::Index>(fm.nodes[i].size());
    Eigen::MatrixXd N(nodes, static_cast<Eigen::Index>(cluster.size()));
    for (Eigen::Index r = 0; r < nodes; ++r)
      for (std::size_t c = 0; c < cluster.size(); ++c)
        N(r, static_cast<Eigen::Index>(c)) = spec.eigenfunction(cluster[c])[i][static_cast<std::size_t>(r)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
    const double smallest = svd.singularValues().tail(1)(0);
    if (smallest < 1e-6 * umax * std::sqrt(static_cast<double>(nodes))) {
      report.vanishing_edge = true;
      report.vanishing_on = EdgeId{i};
    }
  }

  if (cluster.size() == 1) {
    const auto& u2 = spec.eigenfunction(1);
    for (std::size_t i = 0; i < g.edge_count() && !report.pendant_suggestion; ++i) {
      const auto& xs = fm.nodes[i];
      for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const double a = u2[i][j], b = u2[i][j + 1];
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
          const double s = a == 0.0 ? xs[j] : xs[j] + (xs[j + 1] - xs[j]) * a / (a - b);
          report.pendant_suggestion = PointOnGraph{EdgeId{i}, s};
          break;
        }
      }
    }
  }

  // signed distance centred on a leaf edge, zero mean, leaf side negative
  const ConvexOnPaths convex = convex_on_leaf_paths(g, M);
  for (VertexId leaf : leaves(g)) {
    const EdgeId e = g.incident(leaf).front();
    const Edge& edge = g.edge(e);
    const bool leaf_at_end = edge.to == leaf;
    auto sigma_at = [&](double s) {
      const PointOnGraph x0{e, s};
      const PointRemoval removal = remove_point(g, x0);
      const int minus = leaf_at_end ? removal.after_component : removal.before_component;
      return signed_distance(g, x0, {minus}).sigma;
    };
    auto mean = [&](double s) { return sigma_at(s).integral(); };
    const double lo = 1e-9 * edge.length, hi = edge.length * (1 - 1e-9);
    const double flo = mean(lo), fhi = mean(hi);
    if (!(flo * fhi < 0.0)) continue;
    std::uintmax_t iters = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(mean, lo, hi, flo, fhi,
                                                         boost::math::tools::eps_tolerance<double>(50), iters);
    const double s0 = 0.5 * (a + b);
    const Potential sigma = sigma_at(s0);
    CertifyOptions opts;
    opts.solve = solve;
    const FHReport fh = certify_with_spectrum(g, zero, spec, convex, sigma, Direction::Minimize, opts);
    if (fh.verdict == Verdict::NotMinimal) report.sigma_witnesses.push_back({PointOnGraph{e, s0}, fh.integral, fh.margin});
  }

  report.constant_not_minimal = !report.leaf_small.empty() || report.vanishing_edge || report.multiplicity >= 2 ||
                                !report.sigma_witnesses.empty();
  return report;
}

BoundAudit bound_audit(const MetricGraph& g, const Potential& q, const SolveOptions& solve) {
  BoundAudit audit;
  audit.diameter = diameter(g).value;
  audit.is_tree = g.is_tree();
  audit.sup_q = q.sup_norm();
  audit.gamma = fundamental_gap(g, q, solve);
  audit.gamma_zero = fundamental_gap(g, Potential::constant(g, 0.0), solve);
  const double base = std::numbers::pi * std::numbers::pi / (audit.diameter * audit.diameter);
  audit.upper_margin = base + audit.sup_q - audit.gamma;
  audit.zero_margin = base - audit.gamma_zero;
  const double slack = 1e-8 * (1.0 + base + audit.sup_q);
  audit.positive = audit.gamma > 0.0;
  if (audit.is_tree) {
    audit.upper_ok = audit.upper_margin >= -slack;
    audit.zero_ok = audit.zero_margin >= -slack;
  }
  return audit;
}

}  // namespace gapgraph
