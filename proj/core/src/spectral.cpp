#include "gapgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

DofMap number_dofs(const MetricGraph& g, const Mesh& mesh) {
  DofMap map;
  map.vertex_dof.assign(g.vertex_count(), -1);
  int next = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (!g.condition(VertexId{v}).is_dirichlet()) map.vertex_dof[v] = next++;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& edge = g.edges()[i];
    const std::size_t n = mesh.nodes[i].size();
    std::vector<int> dofs(n);
    dofs.front() = map.vertex_dof[index(edge.from)];
    dofs.back() = map.vertex_dof[index(edge.to)];
    for (std::size_t j = 1; j + 1 < n; ++j) dofs[j] = next++;
    map.node_dof.push_back(std::move(dofs));
  }
  map.size = static_cast<std::size_t>(next);
  return map;
}

NodalFunction to_nodal(const DofMap& map, const Eigen::VectorXd& x) {
  NodalFunction u;
  for (const auto& dofs : map.node_dof) {
    std::vector<double> vals(dofs.size());
    for (std::size_t j = 0; j < dofs.size(); ++j) vals[j] = dofs[j] < 0 ? 0.0 : x[dofs[j]];
    u.push_back(std::move(vals));
  }
  return u;
}

// u1 positive in mean; higher modes nonnegative at the lowest-indexed leaf,
// falling back to the first clearly nonzero unknown.
void fix_signs(const MetricGraph& g, const DofMap& map, const SparseMatrix& B, Eigen::MatrixXd& X) {
  const auto lv = leaves(g);
  const VertexId anchor = lv.empty() ? VertexId{0} : lv.front();
  const int anchor_dof = map.vertex_dof[index(anchor)];
  const Eigen::VectorXd mass = B * Eigen::VectorXd::Ones(B.rows());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    auto col = X.col(c);
    double key = 0.0;
    const double big = col.cwiseAbs().maxCoeff();
    if (c == 0) {
      key = mass.dot(col);
    } else {
      if (anchor_dof >= 0 && std::abs(col[anchor_dof]) > 1e-8 * big) key = col[anchor_dof];
      for (Eigen::Index i = 0; key == 0.0 && i < col.size(); ++i)
        if (std::abs(col[i]) > 1e-8 * big) key = col[i];
    }
    if (key < 0.0) col *= -1.0;
  }
}

std::size_t locate(const std::vector<double>& xs, double s) {
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  const auto j = static_cast<std::size_t>(std::distance(xs.begin(), it));
  return std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, xs.size() - 2);
}

double interp(const std::vector<double>& xs, const std::vector<double>& u, std::size_t j, double s) {
  const double t = (s - xs[j]) / (xs[j + 1] - xs[j]);
  return u[j] + (u[j + 1] - u[j]) * t;
}

SpectrumLevel solve_level(const MetricGraph& g, const Potential& q, const Mesh& mesh, const SolveOptions& options) {
  Assembly sys = assemble(g, q, mesh);
  if (options.k > sys.dofs.size)
    throw Error(ErrorCode::SolverFailure, "requested " + std::to_string(options.k) + " eigenpairs but only " +
                                              std::to_string(sys.dofs.size) + " unknowns");
  EigenOptions eig = options.eigen;
  if (!eig.shift) {
    // below min q, and below any attractive delta coupling
    double shift = q.min_value() - 1.0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      const auto& c = g.condition(VertexId{v});
      if (c.kind == VertexCondition::Kind::Delta && c.alpha < 0.0) shift += c.alpha * (1.0 + 2.0 / g.min_edge_length());
    }
    eig.shift = shift;
  }
  EigenPairs pairs = lowest_eigenpairs(sys.A, sys.B, options.k, eig);
  fix_signs(g, sys.dofs, sys.B, pairs.vectors);
  SpectrumLevel level;
  level.mesh = mesh;
  level.iterations = pairs.iterations;
  for (Eigen::Index i = 0; i < pairs.values.size(); ++i) {
    level.eigenvalues.push_back(pairs.values[i]);
    level.residuals.push_back(pairs.residuals[i]);
    level.eigenfunctions.push_back(to_nodal(sys.dofs, pairs.vectors.col(i)));
  }
  return level;
}

}  // namespace

Assembly assemble(const MetricGraph& g, const Potential& q, const Mesh& mesh) {
  if (!q.compatible_with(g)) throw Error(ErrorCode::InvalidPotential, "potential does not match the graph");
  if (mesh.edge_count() != g.edge_count()) throw Error(ErrorCode::MeshMisaligned, "mesh does not match the graph");
  if (!aligned(mesh, q)) throw Error(ErrorCode::MeshMisaligned, "a potential breakpoint is not a mesh node");

  Assembly out;
  out.dofs = number_dofs(g, mesh);
  std::vector<Eigen::Triplet<double>> ta, tb;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto& xs = mesh.nodes[i];
    const auto& dofs = out.dofs.node_dof[i];
    const EdgeId e{i};
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
      const double h = xs[j + 1] - xs[j];
      const double qa = q.right_limit(e, xs[j]), qb = q.left_limit(e, xs[j + 1]);
      const double k[2][2] = {{1.0 / h + h * (3 * qa + qb) / 12.0, -1.0 / h + h * (qa + qb) / 12.0},
                              {-1.0 / h + h * (qa + qb) / 12.0, 1.0 / h + h * (qa + 3 * qb) / 12.0}};
      const double m[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
      const int d[2] = {dofs[j], dofs[j + 1]};
      for (int r = 0; r < 2; ++r) {
        if (d[r] < 0) continue;
        for (int c = 0; c < 2; ++c) {
          if (d[c] < 0) continue;
          ta.emplace_back(d[r], d[c], k[r][c]);
          tb.emplace_back(d[r], d[c], m[r][c]);
        }
      }
    }
  }
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& cond = g.condition(VertexId{v});
    if (cond.kind == VertexCondition::Kind::Delta && out.dofs.vertex_dof[v] >= 0)
      ta.emplace_back(out.dofs.vertex_dof[v], out.dofs.vertex_dof[v], cond.alpha);
  }
  const auto n = static_cast<Eigen::Index>(out.dofs.size);
  out.A.resize(n, n);
  out.B.resize(n, n);
  out.A.setFromTriplets(ta.begin(), ta.end());
  out.B.setFromTriplets(tb.begin(), tb.end());
  return out;
}

std::vector<std::size_t> SpectrumResult::cluster(std::size_t n) const {
  std::vector<std::size_t> out;
  const double ln = eigenvalues.at(n);
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double scale = std::max(std::abs(ln), std::abs(eigenvalues[i]));
    if (std::abs(eigenvalues[i] - ln) <= multiplicity_tol * scale) out.push_back(i);
  }
  return out;
}

SpectrumResult solve_spectrum(const MetricGraph& g, const Potential& q, const SolveOptions& options) {
  const Potential* honor[] = {&q};
  const Mesh mesh = build_mesh(g, honor, options.mesh, options.extra_nodes);
  return solve_spectrum(g, q, mesh, options);
}

SpectrumResult solve_spectrum(const MetricGraph& g, const Potential& q, const Mesh& mesh, const SolveOptions& options) {
  SpectrumResult result;
  result.multiplicity_tol = options.multiplicity_tol;
  if (!options.extrapolate) {
    result.fine = solve_level(g, q, mesh, options);
    result.eigenvalues = result.fine.eigenvalues;
    result.error_estimates.assign(result.eigenvalues.size(), 0.0);
    return result;
  }
  result.coarse = solve_level(g, q, mesh, options);
  result.fine = solve_level(g, q, mesh.refined(), options);
  result.extrapolated = true;
  for (std::size_t i = 0; i < options.k; ++i) {
    const double c = result.coarse->eigenvalues[i], f = result.fine.eigenvalues[i];
    result.eigenvalues.push_back((4.0 * f - c) / 3.0);
    result.error_estimates.push_back(std::abs(f - c) / 3.0);
  }
  return result;
}

double fundamental_gap(const MetricGraph& g, const Potential& q, const SolveOptions& options) {
  SolveOptions opts = options;
  opts.k = std::max<std::size_t>(opts.k, 2);
  return solve_spectrum(g, q, opts).gap();
}

double evaluate(const Mesh& mesh, const NodalFunction& u, PointOnGraph x) {
  const auto& xs = mesh.nodes.at(index(x.edge));
  if (!(x.s >= 0.0 && x.s <= xs.back() * (1 + 1e-14))) throw Error(ErrorCode::InvalidPoint, "coordinate outside edge");
  const std::size_t j = locate(xs, x.s);
  return interp(xs, u[index(x.edge)], j, x.s);
}

double weighted_integral(const Mesh& mesh, const NodalFunction& u, const NodalFunction& v, const Potential& P) {
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.edge_count(); ++i) {
    const auto& xs = mesh.nodes[i];
    const auto pieces = P.pieces(EdgeId{i});
    std::size_t j = 0, k = 0;
    double a = 0.0;
    while (j + 1 < xs.size() && k < pieces.size()) {
      const double b = std::min(xs[j + 1], pieces[k].s1);
      if (b > a) {
        const double m = 0.5 * (a + b);
        const auto& p = pieces[k];
        auto f = [&](double s, double pv) { return pv * interp(xs, u[i], j, s) * interp(xs, v[i], j, s); };
        const double pa = p.at(a), pb = p.at(b);
        total += (b - a) / 6.0 * (f(a, pa) + 4.0 * f(m, 0.5 * (pa + pb)) + f(b, pb));
      }
      a = b;
      const bool end_elem = xs[j + 1] <= b;
      const bool end_piece = pieces[k].s1 <= b;
      if (end_elem) ++j;
      if (end_piece) ++k;
    }
  }
  return total;
}

double inner_product(const Mesh& mesh, const NodalFunction& u, const NodalFunction& v) {
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.edge_count(); ++i) {
    const auto& xs = mesh.nodes[i];
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
      const double h = xs[j + 1] - xs[j];
      total += h / 6.0 * (2 * u[i][j] * v[i][j] + u[i][j] * v[i][j + 1] + u[i][j + 1] * v[i][j] +
                          2 * u[i][j + 1] * v[i][j + 1]);
    }
  }
  return total;
}

bool Diagnostics::any_violation() const noexcept {
  return std::any_of(edges.begin(), edges.end(), [](const EdgeDiagnostics& e) { return e.violation; });
}

Diagnostics eigen_diagnostics(const SpectrumResult& result, const MetricGraph& g) {
  if (result.count() < 2) throw Error(ErrorCode::SolverFailure, "diagnostics need two eigenpairs");
  Diagnostics out;
  out.degenerate_second = result.cluster(1).size() > 1;
  const auto& mesh = result.fine.mesh;
  const auto& u1 = result.eigenfunction(0);
  const auto& u2 = result.eigenfunction(1);

  double fmax = 0.0, umax = 0.0;
  for (std::size_t i = 0; i < mesh.edge_count(); ++i)
    for (std::size_t j = 0; j < mesh.nodes[i].size(); ++j) {
      fmax = std::max(fmax, std::abs(u2[i][j] * u2[i][j] - u1[i][j] * u1[i][j]));
      umax = std::max(umax, std::abs(u2[i][j]));
    }
  const double ftol = 1e-9 * fmax, utol = 1e-9 * umax;
  auto sgn = [](double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); };
  auto is_leaf = [&](VertexId v) { return g.degree(v) == 1 && !g.condition(v).is_dirichlet(); };

  for (std::size_t i = 0; i < mesh.edge_count(); ++i) {
    const auto& xs = mesh.nodes[i];
    const auto& edge = g.edges()[i];
    EdgeDiagnostics d;
    d.edge = EdgeId{i};

    // split nodes into stretches where u2 keeps one strict sign
    std::vector<std::vector<std::size_t>> stretches(1);
    int cur = 0;
    int fsign_all = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const int su = sgn(u2[i][j], utol);
      if (su != 0 && cur != 0 && su != cur) {
        ++d.u2_sign_changes;
        stretches.emplace_back();
      }
      if (su != 0) cur = su;
      stretches.back().push_back(j);
      const int sf = sgn(u2[i][j] * u2[i][j] - u1[i][j] * u1[i][j], ftol);
      if (sf != 0) {
        if (fsign_all != 0 && sf != fsign_all) ++d.zeros;
        fsign_all = sf;
      }
    }
    for (std::size_t c = 0; c < stretches.size(); ++c) {
      int count = 0, fs = 0;
      for (std::size_t j : stretches[c]) {
        const int sf = sgn(u2[i][j] * u2[i][j] - u1[i][j] * u1[i][j], ftol);
        if (sf != 0) {
          if (fs != 0 && sf != fs) ++count;
          fs = sf;
        }
      }
      const bool at_leaf = (c == 0 && is_leaf(edge.from)) || (c + 1 == stretches.size() && is_leaf(edge.to));
      d.component_zeros.push_back(count);
      d.component_at_leaf.push_back(at_leaf);
      if (count > (at_leaf ? 1 : 2)) d.violation = true;

      // Wronskian at element midpoints inside the stretch
      std::vector<double> w;
      for (std::size_t t = 0; t + 1 < stretches[c].size(); ++t) {
        const std::size_t j = stretches[c][t];
        const double h = xs[j + 1] - xs[j];
        const double a1 = 0.5 * (u1[i][j] + u1[i][j + 1]), a2 = 0.5 * (u2[i][j] + u2[i][j + 1]);
        const double d1 = (u1[i][j + 1] - u1[i][j]) / h, d2 = (u2[i][j + 1] - u2[i][j]) / h;
        w.push_back(a1 * d2 - a2 * d1);
      }
      double wmax = 0.0;
      for (double x : w) wmax = std::max(wmax, std::abs(x));
      bool up = true, down = true;
      for (std::size_t t = 1; t < w.size(); ++t) {
        if (w[t] < w[t - 1] - 1e-8 * wmax) up = false;
        if (w[t] > w[t - 1] + 1e-8 * wmax) down = false;
      }
      d.wronskian_trend.push_back(up && !down ? 1 : (down && !up ? -1 : 0));
    }
    out.edges.push_back(std::move(d));
  }
  return out;
}

}  // namespace gapgraph
