#include "gapgraph/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "gapgraph/error.hpp"

namespace gapgraph {

unsigned worker_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("GAPGRAPH_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::thread::hardware_concurrency();
  return std::max(1u, n);
}

namespace {

// Runs body(i) for i in [0, count) on up to `workers` threads.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F body) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ParamFamily default_family(const PotentialClass& cls) {
  if (std::holds_alternative<SingleWell>(cls)) return StepFamily{};
  return PiecewiseLinearFamily{};
}

Parameterization::Parameterization(const MetricGraph& g, ParamFamily family, double M)
    : g_(&g), family_(family), M_(M) {
  if (!(M > 0.0)) throw Error(ErrorCode::InvalidClass, "bound M must be positive");
  if (const auto* pl = std::get_if<PiecewiseLinearFamily>(&family_)) {
    lower_.assign(g.vertex_count(), 0.0);
    upper_.assign(g.vertex_count(), M);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
      edge_offset_.push_back(lower_.size());
      for (std::size_t k = 0; k < pl->kinks; ++k) {
        lower_.insert(lower_.end(), {0.0, 0.0});
        upper_.insert(upper_.end(), {1.0, M});
      }
    }
  } else {
    const std::size_t J = std::get<StepFamily>(family_).jumps;
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
      edge_offset_.push_back(lower_.size());
      lower_.insert(lower_.end(), 2 * J + 1, 0.0);
      upper_.insert(upper_.end(), J, 1.0);
      upper_.insert(upper_.end(), J + 1, M);
    }
  }
}

std::vector<double> Parameterization::project(std::vector<double> theta) const {
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::clamp(theta[i], lower_[i], upper_[i]);
  if (const auto* st = std::get_if<StepFamily>(&family_)) {
    for (std::size_t off : edge_offset_) std::sort(theta.begin() + off, theta.begin() + off + st->jumps);
  } else {
    const std::size_t K = std::get<PiecewiseLinearFamily>(family_).kinks;
    for (std::size_t off : edge_offset_) {
      std::vector<std::pair<double, double>> kinks;
      for (std::size_t k = 0; k < K; ++k) kinks.emplace_back(theta[off + 2 * k], theta[off + 2 * k + 1]);
      std::sort(kinks.begin(), kinks.end());
      for (std::size_t k = 0; k < K; ++k) {
        theta[off + 2 * k] = kinks[k].first;
        theta[off + 2 * k + 1] = kinks[k].second;
      }
    }
  }
  return theta;
}

Potential Parameterization::realize(const std::vector<double>& raw) const {
  const auto theta = project(raw);
  std::vector<std::vector<Piece>> all;
  for (std::size_t i = 0; i < g_->edge_count(); ++i) {
    const auto& edge = g_->edges()[i];
    const double L = edge.length;
    const double min_len = 1e-9 * L;
    const std::size_t off = edge_offset_[i];
    std::vector<Piece> list;
    if (const auto* st = std::get_if<StepFamily>(&family_)) {
      const std::size_t J = st->jumps;
      double start = 0.0;
      for (std::size_t k = 0; k <= J; ++k) {
        const double end = k == J ? L : theta[off + k] * L;
        const double level = theta[off + J + k];
        if (end - start > min_len) {
          list.push_back({start, end, level, level});
          start = end;
        } else if (k == J && !list.empty()) {
          list.back().s1 = L;
        }
      }
      if (list.empty()) list.push_back({0.0, L, theta[off + J], theta[off + J]});
      list.back().s1 = L;
    } else {
      const std::size_t K = std::get<PiecewiseLinearFamily>(family_).kinks;
      std::vector<std::pair<double, double>> nodes{{0.0, theta[index(edge.from)]}};
      for (std::size_t k = 0; k < K; ++k) {
        const double s = theta[off + 2 * k] * L;
        if (s - nodes.back().first > min_len && L - s > min_len) nodes.emplace_back(s, theta[off + 2 * k + 1]);
      }
      nodes.emplace_back(L, theta[index(edge.to)]);
      for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
        list.push_back({nodes[k].first, nodes[k + 1].first, nodes[k].second, nodes[k + 1].second});
    }
    all.push_back(std::move(list));
  }
  return Potential::from_pieces(*g_, std::move(all));
}

std::vector<double> Parameterization::normalized(std::vector<double> theta) const {
  std::vector<std::size_t> values;
  if (const auto* st = std::get_if<StepFamily>(&family_)) {
    for (std::size_t off : edge_offset_)
      for (std::size_t k = 0; k <= st->jumps; ++k) values.push_back(off + st->jumps + k);
  } else {
    for (std::size_t v = 0; v < g_->vertex_count(); ++v) values.push_back(v);
    const std::size_t K = std::get<PiecewiseLinearFamily>(family_).kinks;
    for (std::size_t off : edge_offset_)
      for (std::size_t k = 0; k < K; ++k) values.push_back(off + 2 * k + 1);
  }
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i : values) lo = std::min(lo, theta[i]);
  for (std::size_t i : values) theta[i] -= lo;
  return theta;
}

std::vector<double> Parameterization::constant(double c) const {
  return leaf_raised(c, std::vector<double>(g_->vertex_count(), 0.0));
}

std::vector<double> Parameterization::leaf_raised(double c, const std::vector<double>& raise) const {
  std::vector<double> theta(dimension(), c);
  auto bump = [&](VertexId v) { return g_->degree(v) == 1 ? raise.at(index(v)) : 0.0; };
  if (const auto* st = std::get_if<StepFamily>(&family_)) {
    const std::size_t J = st->jumps;
    for (std::size_t i = 0; i < g_->edge_count(); ++i) {
      const auto& edge = g_->edges()[i];
      const std::size_t off = edge_offset_[i];
      for (std::size_t k = 0; k < J; ++k) theta[off + k] = static_cast<double>(k + 1) / static_cast<double>(J + 1);
      theta[off + J] = c + bump(edge.from);
      theta[off + 2 * J] = c + bump(edge.to);
    }
  } else {
    const std::size_t K = std::get<PiecewiseLinearFamily>(family_).kinks;
    for (std::size_t v = 0; v < g_->vertex_count(); ++v) theta[v] = c + bump(VertexId{v});
    for (std::size_t i = 0; i < g_->edge_count(); ++i) {
      const auto& edge = g_->edges()[i];
      const std::size_t off = edge_offset_[i];
      for (std::size_t k = 0; k < K; ++k) {
        const double f = static_cast<double>(k + 1) / static_cast<double>(K + 1);
        theta[off + 2 * k] = f;
        theta[off + 2 * k + 1] = (1 - f) * theta[index(edge.from)] + f * theta[index(edge.to)];
      }
    }
  }
  return project(std::move(theta));
}

std::vector<double> Parameterization::cut_raised(double c, PointOnGraph x, bool raise_after, double h) const {
  const auto* st = std::get_if<StepFamily>(&family_);
  if (!st || st->jumps == 0) throw Error(ErrorCode::InvalidClass, "cut starts need a step family with jumps");
  const std::size_t J = st->jumps;
  const PointRemoval removal = remove_point(*g_, x);
  const int target = raise_after ? removal.after_component : removal.before_component;
  std::vector<double> theta(dimension(), c);
  for (std::size_t i = 0; i < g_->edge_count(); ++i) {
    const std::size_t off = edge_offset_[i];
    for (std::size_t k = 0; k < J; ++k) theta[off + k] = static_cast<double>(k + 1) / static_cast<double>(J + 1);
    if (removal.split_edge && index(*removal.split_edge) == i) {
      // one jump at x; the others sit on the raised side where they change nothing
      const double f = x.s / g_->edges()[i].length;
      const double Jd = static_cast<double>(J);
      for (std::size_t k = 0; k < J; ++k) {
        const double kd = static_cast<double>(k);
        theta[off + k] = raise_after ? f + (1.0 - f) * kd / Jd : f * (kd + 1.0) / Jd;
      }
      for (std::size_t k = 0; k <= J; ++k) {
        const bool raised = raise_after ? k > 0 : k < J;
        theta[off + J + k] = c + (raised ? h : 0.0);
      }
    } else if (removal.edge_component[i] == target) {
      for (std::size_t k = 0; k <= J; ++k) theta[off + J + k] = c + h;
    }
  }
  return project(std::move(theta));
}

namespace {

struct RestartOutcome {
  std::vector<double> theta;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

}  // namespace

OptimizationResult optimize_gap(const MetricGraph& g, const PotentialClass& cls, Direction direction,
                                const OptimizeOptions& options) {
  validate_class(g, cls);
  if (std::holds_alternative<SingleWell>(cls) && std::get<SingleWell>(cls).tree_edges.empty() && !g.is_tree())
    throw Error(ErrorCode::NotATree, "single-well families need a tree");
  const double M = class_bound(cls);
  const ParamFamily family = options.family.value_or(default_family(cls));
  const Parameterization param(g, family, M);
  const double sign = direction == Direction::Minimize ? 1.0 : -1.0;
  const int restarts = std::max(1, options.restarts);
  const std::size_t share = std::max<std::size_t>(1, options.budget / static_cast<std::size_t>(restarts));

  // Starting points are drawn up front so results do not depend on scheduling.
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<double>> starts;
  const auto* steps = std::get_if<StepFamily>(&family);
  std::uniform_int_distribution<std::size_t> pick_edge(0, g.edge_count() - 1);
  for (int r = 0; r < restarts; ++r) {
    if (r == 0) {
      starts.push_back(param.constant(0.5 * M));
      continue;
    }
    if (steps && steps->jumps > 0 && r % 2 == 1) {
      // one jump at a random interior point: coordinate moves from the
      // constant only reach stretches at leaves, so interior wells need a seed
      const EdgeId e{pick_edge(rng)};
      const PointOnGraph x{e, g.edge(e).length * (0.05 + 0.9 * unif(rng))};
      const bool after = unif(rng) < 0.5;
      starts.push_back(param.cut_raised(0.0, x, after, M * (0.1 + 0.9 * unif(rng))));
      continue;
    }
    const double c = 0.5 * M * unif(rng);
    std::vector<double> raise(g.vertex_count(), 0.0);
    for (auto& x : raise) x = unif(rng) < 0.5 ? (M - c) * unif(rng) : 0.0;
    starts.push_back(param.leaf_raised(c, raise));
  }

  auto objective = [&](const std::vector<double>& theta) {
    const Potential q = param.realize(theta);
    if (!is_member(g, q, cls)) return std::numeric_limits<double>::infinity();
    try {
      return sign * fundamental_gap(g, q, options.search_solve);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
  parallel_for(outcomes.size(), worker_count(options.threads), [&](std::size_t r) {
    RestartOutcome& out = outcomes[r];
    std::vector<double> theta = param.normalized(starts[r]);
    double f = objective(theta);
    ++out.evaluations;
    if (!std::isfinite(f)) {
      theta = param.constant(0.5 * M);
      f = objective(theta);
      ++out.evaluations;
    }
    out.trace.push_back({out.evaluations, static_cast<int>(r), sign * f});
    double step = options.initial_step;
    const auto& lo = param.lower();
    const auto& hi = param.upper();
    while (step >= options.min_step && out.evaluations < share) {
      bool improved = false;
      for (std::size_t i = 0; i < theta.size() && out.evaluations < share; ++i) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> cand = theta;
          cand[i] += dir * step * (hi[i] - lo[i]);
          cand = param.normalized(param.project(std::move(cand)));
          if (cand == theta) continue;
          const double fc = objective(cand);
          ++out.evaluations;
          if (fc < f - 1e-12 * (1.0 + std::abs(f))) {
            theta = std::move(cand);
            f = fc;
            improved = true;
            out.trace.push_back({out.evaluations, static_cast<int>(r), sign * f});
            // expansion: keep going this way with doubled steps while it pays
            for (double mult = 2.0; out.evaluations < share; mult *= 2.0) {
              std::vector<double> further = theta;
              further[i] += dir * mult * step * (hi[i] - lo[i]);
              further = param.normalized(param.project(std::move(further)));
              if (further == theta) break;
              const double ff = objective(further);
              ++out.evaluations;
              if (!(ff < f - 1e-12 * (1.0 + std::abs(f)))) break;
              theta = std::move(further);
              f = ff;
              out.trace.push_back({out.evaluations, static_cast<int>(r), sign * f});
            }
            break;
          }
          if (out.evaluations >= share) break;
        }
      }
      if (!improved) step *= 0.5;
    }
    out.converged = step < options.min_step;
    out.theta = std::move(theta);
    out.value = f;
  });

  const auto best = std::min_element(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.theta < b.theta;
  });
  if (!std::isfinite(best->value)) throw Error(ErrorCode::SolverFailure, "no feasible starting point");

  OptimizationResult result;
  result.direction = direction;
  result.theta = best->theta;
  result.q_star = param.realize(best->theta).simplified(1e-12 * (1.0 + M));
  result.gamma_search = sign * best->value;
  result.converged = best->converged;
  for (const auto& o : outcomes) {
    result.evaluations += o.evaluations;
    result.trace.insert(result.trace.end(), o.trace.begin(), o.trace.end());
  }
  SolveOptions fin = options.final_solve;
  fin.k = std::max<std::size_t>(fin.k, 3);
  const SpectrumResult spec = solve_spectrum(g, result.q_star, fin);
  result.gamma_star = spec.gap();
  result.multiplicity_at_opt = spec.cluster(1).size();
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const auto ps = result.q_star.pieces(EdgeId{i});
    std::size_t n = 0;
    const double tol = 1e-9 * (1.0 + M);
    for (std::size_t k = 1; k < ps.size(); ++k) {
      const bool jump = std::abs(ps[k].v0 - ps[k - 1].v1) > tol;
      const bool kink = std::abs(ps[k].slope() - ps[k - 1].slope()) > tol;
      if (jump || kink) ++n;
    }
    result.realized_breaks.push_back(n);
  }
  return result;
}

StationarityReport stationarity_check(const MetricGraph& g, const Potential& q, const PotentialClass& cls,
                                      const StationarityOptions& options) {
  validate_class(g, cls);
  if (!is_member(g, q, cls, std::nullopt, options.certify.policy))
    throw Error(ErrorCode::NotInClass, "candidate potential is not in the class");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_edge = [&] { return EdgeId{static_cast<std::size_t>(unif(rng) * static_cast<double>(g.edge_count())) % g.edge_count()}; };

  std::vector<std::pair<std::string, Potential>> probes;
  for (std::size_t i = 0; i < options.n_probes; ++i) {
    const EdgeId e = random_edge();
    const double L = g.edge(e).length;
    double a = unif(rng), b = unif(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.05) b = std::min(1.0, a + 0.05), a = b - 0.05;
    const double sgn = (i / 4) % 2 == 0 ? -1.0 : 1.0;
    const std::string where = g.edge(e).name + "[" + std::to_string(a * L) + "," + std::to_string(b * L) + "]";
    switch (i % 4) {
      case 0:
        probes.emplace_back((sgn < 0 ? "-indicator " : "indicator ") + where, indicator(g, e, a * L, b * L) * sgn);
        break;
      case 1: {
        const PointOnGraph c{e, a * L};
        probes.emplace_back("tent " + where, tent(g, c, std::max(0.05, b - a) * L));
        break;
      }
      case 2:
        probes.emplace_back("ramp " + where, ramp(g, e, a * L, b * L, sgn / L));
        break;
      default: {
        const PointOnGraph x0{e, std::clamp(a, 0.02, 0.98) * L};
        const PointRemoval removal = remove_point(g, x0);
        if (removal.component_count >= 2) {
          probes.emplace_back("sigma " + g.edge(e).name + "@" + std::to_string(x0.s),
                              signed_distance(g, x0, {removal.after_component}).sigma);
        } else {
          probes.emplace_back("indicator " + where, indicator(g, e, a * L, b * L));
        }
      }
    }
  }

  SolveOptions solve = options.certify.solve;
  solve.k = std::max<std::size_t>(solve.k, 3);
  const SpectrumResult spec = solve_spectrum(g, q, solve);

  StationarityReport report;
  double worst_score = -std::numeric_limits<double>::infinity();
  for (auto& [name, P] : probes) {
    const double norm = P.sup_norm();
    if (norm == 0.0) continue;
    const Potential dir = P * (1.0 / norm);
    FHReport fh = certify_with_spectrum(g, q, spec, cls, dir, options.direction, options.certify);
    ++report.probes;
    if (!fh.range || (fh.range->t_max <= 0.0 && fh.range->t_min >= 0.0)) continue;
    ++report.admissible;
    const auto& mu = fh.matrix.multiplicity == 1 ? std::vector<double>{fh.integral} : fh.matrix.eigenvalues;
    const double lo = *std::min_element(mu.begin(), mu.end());
    const double hi = *std::max_element(mu.begin(), mu.end());
    double score = -std::numeric_limits<double>::infinity();
    const bool fwd = fh.range->t_max > 0.0, bwd = fh.range->t_min < 0.0;
    if (options.direction == Direction::Minimize) {
      if (fwd) score = std::max(score, -lo);
      if (bwd) score = std::max(score, hi);
    } else {
      if (fwd) score = std::max(score, lo);
      if (bwd) score = std::max(score, -hi);
    }
    const double allowed = fh.margin + options.slack;
    const bool violation = score > allowed;
    if (score - allowed > worst_score) {
      worst_score = score - allowed;
      report.worst = StationarityProbe{name, fh.integral, allowed, *fh.range, violation};
    }
    if (violation) report.passed = false;
  }
  return report;
}

}  // namespace gapgraph
