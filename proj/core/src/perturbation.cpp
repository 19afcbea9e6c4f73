#include "gapgraph/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gapgraph/error.hpp"

namespace gapgraph {

namespace {

Eigen::MatrixXd level_matrix(const SpectrumLevel& level, const std::vector<std::size_t>& cluster, const Potential& P,
                             double u2_scale) {
  const auto n = static_cast<Eigen::Index>(cluster.size());
  const auto& u1 = level.eigenfunctions.at(0);
  const double base = weighted_integral(level.mesh, u1, u1, P);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j; k < n; ++k) {
      const auto& a = level.eigenfunctions.at(cluster[static_cast<std::size_t>(j)]);
      const auto& b = level.eigenfunctions.at(cluster[static_cast<std::size_t>(k)]);
      m(j, k) = m(k, j) = u2_scale * u2_scale * weighted_integral(level.mesh, a, b, P) - (j == k ? base : 0.0);
    }
  return m;
}

double vertex_scale(const SpectrumLevel& level, const MetricGraph& g, const Normalization& norm) {
  if (norm.kind == Normalization::Kind::L2) return 1.0;
  const double value = evaluate(level.mesh, level.eigenfunctions.at(1), g.point_at(norm.vertex));
  if (std::abs(value) < 1e-12) throw Error(ErrorCode::DegenerateSecond, "u2 vanishes at the normalization vertex");
  return 1.0 / value;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

std::string_view to_string(Direction d) noexcept { return d == Direction::Minimize ? "min" : "max"; }

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::NotMinimal: return "NotMinimal";
    case Verdict::NotMaximal: return "NotMaximal";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string Normalization::describe(const MetricGraph& g) const {
  if (kind == Kind::L2) return "l2";
  return "u2(" + g.vertex_name(vertex) + ")=1";
}

FHValue fh_integral(const SpectrumResult& spec, const Potential& P, const MetricGraph& g, const Normalization& norm) {
  if (spec.count() < 2) throw Error(ErrorCode::SolverFailure, "spectrum has fewer than two eigenpairs");
  const auto cluster = spec.cluster(1);
  if (cluster.size() > 1)
    throw Error(ErrorCode::DegenerateSecond, "second eigenvalue has multiplicity " + std::to_string(cluster.size()));
  if (!P.compatible_with(g)) throw Error(ErrorCode::InvalidPotential, "perturbation does not match the graph");
  auto at = [&](const SpectrumLevel& level) {
    return level_matrix(level, {1}, P, vertex_scale(level, g, norm))(0, 0);
  };
  const double fine = at(spec.fine);
  if (!spec.coarse) return {fine, 0.0};
  const double coarse = at(*spec.coarse);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

FHMatrix fh_matrix(const SpectrumResult& spec, const Potential& P) {
  if (spec.count() < 2) throw Error(ErrorCode::SolverFailure, "spectrum has fewer than two eigenpairs");
  const auto cluster = spec.cluster(1);
  if (cluster.back() + 1 == spec.count() && cluster.size() > 1)
    throw Error(ErrorCode::SolverFailure, "cluster of the second eigenvalue may extend past the computed pairs");
  FHMatrix out;
  out.multiplicity = cluster.size();
  const Eigen::MatrixXd fine = level_matrix(spec.fine, cluster, P, 1.0);
  const Eigen::VectorXd ef = sorted_eigenvalues(fine);
  Eigen::VectorXd ec = ef;
  if (spec.coarse) ec = sorted_eigenvalues(level_matrix(*spec.coarse, cluster, P, 1.0));
  const bool scalar = cluster.size() == 1;
  for (Eigen::Index j = 0; j < fine.rows(); ++j) {
    std::vector<double> row;
    for (Eigen::Index k = 0; k < fine.cols(); ++k) row.push_back(fine(j, k));
    out.entries.push_back(std::move(row));
  }
  for (Eigen::Index i = 0; i < ef.size(); ++i) {
    out.eigenvalues.push_back(spec.coarse ? (4.0 * ef[i] - ec[i]) / 3.0 : ef[i]);
    out.errors.push_back(std::abs(ef[i] - ec[i]) / 3.0);
  }
  if (scalar) out.entries[0][0] = out.eigenvalues[0];
  return out;
}

FHReport certify_non_optimal(const MetricGraph& g, const Potential& q, const PotentialClass& cls, const Potential& P,
                             Direction direction, const CertifyOptions& options) {
  validate_class(g, cls);
  if (!is_member(g, q, cls, std::nullopt, options.policy))
    throw Error(ErrorCode::NotInClass, "candidate potential is not in the class");
  SolveOptions solve = options.solve;
  for (std::size_t i = 0; i < P.edge_count(); ++i)
    for (double b : P.breakpoints(EdgeId{i})) solve.extra_nodes.push_back({EdgeId{i}, b});
  const Potential* honor[] = {&q};
  const Mesh mesh = build_mesh(g, honor, solve.mesh, solve.extra_nodes);
  std::size_t unknowns = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) unknowns += g.condition(VertexId{v}).is_dirichlet() ? 0 : 1;
  unknowns += mesh.total_elements() - g.edge_count();
  solve.k = std::min(std::max<std::size_t>(solve.k, 3), unknowns);
  const SpectrumResult spec = solve_spectrum(g, q, mesh, solve);
  return certify_with_spectrum(g, q, spec, cls, P, direction, options);
}

FHReport certify_with_spectrum(const MetricGraph& g, const Potential& q, const SpectrumResult& spec,
                               const PotentialClass& cls, const Potential& P, Direction direction,
                               const CertifyOptions& options) {
  FHReport report;
  report.direction = direction;
  report.normalization = options.normalization.describe(g);
  report.matrix = fh_matrix(spec, P);
  report.multiplicity = report.matrix.multiplicity;
  if (report.multiplicity == 1) {
    const FHValue v = fh_integral(spec, P, g, options.normalization);
    report.integral = v.value;
    report.error_estimate = v.error;
  } else {
    if (options.normalization.kind != Normalization::Kind::L2)
      throw Error(ErrorCode::DegenerateSecond, "vertex normalization is undefined for a degenerate second eigenvalue");
    report.integral = report.matrix.eigenvalues.front();
    report.error_estimate = *std::max_element(report.matrix.errors.begin(), report.matrix.errors.end());
  }
  // Verdicts read the L2-normalized values, the actual derivative. A vertex
  // normalization rescales u2 alone and can flip the sign when u1 is not constant.
  const double l2_error = *std::max_element(report.matrix.errors.begin(), report.matrix.errors.end());
  // never certify below the quadrature and solver noise floor
  report.margin = options.margin_factor * (l2_error + 1e-9 * (1.0 + P.sup_norm()));

  try {
    report.range = admissible_range(g, q, P, cls, options.policy);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateRange) throw;
    report.range = AdmissibleRange{0.0, 0.0};
    report.note = "no admissible t";
    return report;
  }

  // the same rules read for -P when only negative t is admissible
  const std::vector<double>& mu = report.matrix.eigenvalues;
  const double m = report.margin;
  const bool has_negative = std::any_of(mu.begin(), mu.end(), [m](double x) { return x < -m; });
  const bool has_positive = std::any_of(mu.begin(), mu.end(), [m](double x) { return x > m; });
  const bool pos_definite = std::all_of(mu.begin(), mu.end(), [m](double x) { return x > m; });
  const bool neg_definite = std::all_of(mu.begin(), mu.end(), [m](double x) { return x < -m; });
  const bool forward = report.range->t_max > 0.0;
  const bool backward = report.range->t_min < 0.0;

  if (direction == Direction::Minimize) {
    if ((forward && has_negative) || (backward && has_positive)) report.verdict = Verdict::NotMinimal;
  } else {
    if ((forward && pos_definite) || (backward && neg_definite)) report.verdict = Verdict::NotMaximal;
  }
  return report;
}

}  // namespace gapgraph
