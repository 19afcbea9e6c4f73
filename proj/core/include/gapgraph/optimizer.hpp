#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gapgraph/classes.hpp"
#include "gapgraph/perturbation.hpp"
#include "gapgraph/spectral.hpp"

namespace gapgraph {

/// Per edge: up to `jumps` jump positions and jumps + 1 levels in [0, M].
struct StepFamily {
  std::size_t jumps = 2;
};

/// Values at vertices plus up to `kinks` interior (position, value) nodes per edge.
struct PiecewiseLinearFamily {
  std::size_t kinks = 2;
};

using ParamFamily = std::variant<StepFamily, PiecewiseLinearFamily>;

/// Step functions for single-well classes, piecewise linear for convex ones.
ParamFamily default_family(const PotentialClass& cls);

/// Maps a parameter vector to a potential. Positions are fractions of the
/// edge length, sorted on realization; values are clamped to [0, M].
class Parameterization {
 public:
  Parameterization(const MetricGraph& g, ParamFamily family, double M);

  std::size_t dimension() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  std::vector<double> project(std::vector<double> theta) const;
  Potential realize(const std::vector<double>& theta) const;
  /// Shifts all value coordinates so the smallest is 0. The gap does not see
  /// constants, and this frees room below M for the search.
  std::vector<double> normalized(std::vector<double> theta) const;

  /// Constant c everywhere.
  std::vector<double> constant(double c) const;
  /// Constant c, raised by `raise` on the stretch nearest each leaf flagged in `leaf_mask`.
  std::vector<double> leaf_raised(double c, const std::vector<double>& raise) const;
  /// Step family only: constant c, raised by h on one side of the interior point x.
  std::vector<double> cut_raised(double c, PointOnGraph x, bool raise_after, double h) const;

 private:
  const MetricGraph* g_;
  ParamFamily family_;
  double M_;
  std::vector<double> lower_, upper_;
  std::vector<std::size_t> edge_offset_;
};

struct TracePoint {
  std::size_t evaluation;
  int restart;
  double gamma;
};

struct OptimizeOptions {
  std::size_t budget = 4000;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::optional<ParamFamily> family;
  /// Mesh used while searching; the winner is re-solved with `final_solve`.
  SolveOptions search_solve{.k = 2, .mesh = {.min_per_edge = 32, .per_shortest = 32, .max_per_edge = 1024}};
  SolveOptions final_solve{.k = 4};
  double min_step = 1e-4;
  double initial_step = 0.25;
  /// 0 means GAPGRAPH_THREADS or hardware concurrency.
  unsigned threads = 0;
};

struct OptimizationResult {
  Potential q_star;
  std::vector<double> theta;
  double gamma_star = 0.0;
  double gamma_search = 0.0;
  Direction direction = Direction::Minimize;
  std::vector<TracePoint> trace;
  std::size_t evaluations = 0;
  bool converged = false;
  std::size_t multiplicity_at_opt = 1;
  /// Jumps (step family) or kinks (linear family) realized per edge.
  std::vector<std::size_t> realized_breaks;
};

/// Multi-start projected compass search over the family. Never throws
/// BudgetExhausted; a result with converged == false reports it instead.
OptimizationResult optimize_gap(const MetricGraph& g, const PotentialClass& cls, Direction direction,
                                const OptimizeOptions& options = {});

struct StationarityProbe {
  std::string description;
  double value = 0.0;
  double margin = 0.0;
  AdmissibleRange range;
  bool violation = false;
};

struct StationarityReport {
  bool passed = true;
  std::size_t probes = 0;
  std::size_t admissible = 0;
  std::optional<StationarityProbe> worst;
};

struct StationarityOptions {
  std::size_t n_probes = 24;
  std::uint64_t seed = 0;
  Direction direction = Direction::Minimize;
  CertifyOptions certify;
  /// Additional absolute slack on top of the certified margin.
  double slack = 0.0;
};

/// Samples indicator, tent, ramp and signed-distance directions. Throws NotInClass.
StationarityReport stationarity_check(const MetricGraph& g, const Potential& q, const PotentialClass& cls,
                                      const StationarityOptions& options = {});

struct LeafWitness {
  VertexId leaf;
  /// u2(v)^2 and the average (1/L) int u2^2; for clusters the minimum over combinations.
  double value = 0.0;
  double average = 0.0;
};

struct SigmaWitness {
  PointOnGraph x0;
  double integral = 0.0;
  double margin = 0.0;
};

struct ConstantProbeReport {
  std::vector<LeafWitness> leaf_small;
  bool vanishing_edge = false;
  std::optional<EdgeId> vanishing_on;
  std::size_t multiplicity = 1;
  std::optional<PointOnGraph> pendant_suggestion;
  std::vector<SigmaWitness> sigma_witnesses;
  double lambda2 = 0.0;
  bool constant_not_minimal = false;
};

/// Tests on the q = 0 spectrum of a tree. Throws NotATree.
ConstantProbeReport constant_optimality_probe(const MetricGraph& g, double M, const SolveOptions& solve = {.k = 6});

struct BoundAudit {
  double diameter = 0.0;
  double gamma = 0.0;
  double gamma_zero = 0.0;
  double sup_q = 0.0;
  bool is_tree = false;
  /// pi^2/D^2 + |q|_inf - Gamma[q] (trees)
  double upper_margin = 0.0;
  /// pi^2/D^2 - Gamma[0] (trees)
  double zero_margin = 0.0;
  bool upper_ok = true;
  bool zero_ok = true;
  bool positive = true;
  bool passed() const noexcept { return upper_ok && zero_ok && positive; }
};

BoundAudit bound_audit(const MetricGraph& g, const Potential& q, const SolveOptions& solve = {});

/// Worker count: GAPGRAPH_THREADS when set, else hardware concurrency, at least 1.
unsigned worker_count(unsigned requested = 0);

}  // namespace gapgraph
