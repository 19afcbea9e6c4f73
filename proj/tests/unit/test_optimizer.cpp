#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "check_error.hpp"
#include "gapgraph/optimizer.hpp"

using namespace gapgraph;
using namespace gapgraph::testing;

namespace {
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

OptimizeOptions quick(std::size_t budget, int restarts) {
  OptimizeOptions o;
  o.budget = budget;
  o.restarts = restarts;
  o.threads = 1;
  return o;
}
}  // namespace

TEST_CASE("parameterization shapes") {
  const MetricGraph g = star_graph({1.0, 2.0});
  const Parameterization pl(g, PiecewiseLinearFamily{2}, 5.0);
  CHECK(pl.dimension() == 3 + 2 * 2 * 2);
  const Potential c = pl.realize(pl.constant(2.0));
  CHECK(c.min_value() == doctest::Approx(2.0));
  CHECK(c.max_value() == doctest::Approx(2.0));
  const auto n = pl.normalized(pl.constant(2.0));
  CHECK(pl.realize(n).max_value() == doctest::Approx(0.0));

  const Parameterization st(g, StepFamily{1}, 5.0);
  CHECK(st.dimension() == 2 * 3);
  std::vector<double> theta{0.5, 1.0, 4.0, 0.25, 0.0, 9.0};
  const Potential q = st.realize(theta);
  CHECK(q.eval({EdgeId{0}, 0.75}) == doctest::Approx(4.0));
  CHECK(q.eval({EdgeId{1}, 1.0}) == doctest::Approx(5.0));  // clamped to M
  CHECK(st.project(theta)[5] == 5.0);
}

TEST_CASE("convex minimizer on an interval is the constant") {
  const MetricGraph g = interval(1.0);
  const ConvexOnPaths cls = convex_on_leaf_paths(g, 5.0);
  const OptimizationResult r = optimize_gap(g, cls, Direction::Minimize, quick(600, 2));
  CHECK(r.gamma_star == doctest::Approx(kPi2).epsilon(1e-5));
  CHECK(is_member(g, r.q_star, cls));
  CHECK(!r.trace.empty());
}

TEST_CASE("results do not depend on the thread count") {
  const MetricGraph g = star_graph({1.0, 1.5});
  const SingleWell cls = single_well(g, 10.0);
  OptimizeOptions a = quick(300, 3);
  OptimizeOptions b = a;
  b.threads = 3;
  const OptimizationResult ra = optimize_gap(g, cls, Direction::Minimize, a);
  const OptimizationResult rb = optimize_gap(g, cls, Direction::Minimize, b);
  CHECK(ra.theta == rb.theta);
  CHECK(ra.gamma_star == rb.gamma_star);
}

TEST_CASE("single-well minimizer on an interval is a one-jump step") {
  const MetricGraph g = interval(1.0);
  const double M = 20.0;
  OptimizeOptions o = quick(3000, 4);
  const OptimizationResult r = optimize_gap(g, single_well(g, M), Direction::Minimize, o);
  CHECK(r.q_star.max_value() - r.q_star.min_value() > 1.0);
  CHECK(r.gamma_star < kPi2);
  const OneJump best = one_jump_oracle(g, M, o.search_solve);
  const double ref = fundamental_gap(g, raised_component(g, best.at, best.raise_after, best.height));
  CHECK(std::abs(r.gamma_star / ref - 1.0) < 0.01);
}

TEST_CASE("stationarity probes") {
  const MetricGraph line = interval(1.0);
  const StationarityReport flat =
      stationarity_check(line, Potential::constant(line, 0.0), convex_on_leaf_paths(line, 5.0));
  CHECK(flat.passed);

  const MetricGraph star = star_graph({1.0, 2.0, 4.0});
  StationarityOptions o;
  o.n_probes = 32;
  const StationarityReport s =
      stationarity_check(star, Potential::constant(star, 0.0), convex_on_leaf_paths(star, 10.0), o);
  CHECK_FALSE(s.passed);
  REQUIRE(s.worst.has_value());
  CHECK(s.worst->violation);
}

TEST_CASE("constant-potential probes") {
  const MetricGraph star = star_graph({1.0, 2.0, 4.0});
  const ConstantProbeReport a = constant_optimality_probe(star, 10.0);
  CHECK(a.constant_not_minimal);
  REQUIRE_FALSE(a.leaf_small.empty());
  CHECK(star.vertex_name(a.leaf_small.front().leaf) == "v0");  // the leg of length 1
  REQUIRE_FALSE(a.sigma_witnesses.empty());
  CHECK(a.sigma_witnesses.front().x0.s == doctest::Approx(11.0 / 14.0).epsilon(1e-9));
  REQUIRE(a.pendant_suggestion.has_value());
  CHECK(a.pendant_suggestion->edge == EdgeId{2});

  const MetricGraph eq = star_graph({1.0, 1.0, 1.0});
  const ConstantProbeReport b = constant_optimality_probe(eq, 10.0);
  CHECK(b.multiplicity == 2);
  CHECK(b.vanishing_edge);
  CHECK(b.constant_not_minimal);

  const MetricGraph line = interval(1.0);
  const ConstantProbeReport c = constant_optimality_probe(line, 10.0);
  CHECK_FALSE(c.constant_not_minimal);
}

TEST_CASE("bound audit on trees") {
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const BoundAudit b = bound_audit(g, distance_field(g, {EdgeId{0}, 0.5}));
  CHECK(b.is_tree);
  CHECK(b.diameter == doctest::Approx(6.0));
  CHECK(b.passed());
}

TEST_CASE("optimizer input errors") {
  GraphSpec s;
  s.vertices = {"a", "b"};
  s.edges = {{"x", "a", "b", 1.0}, {"y", "b", "a", 1.0}};
  const MetricGraph loop = MetricGraph::build(s);
  CHECK_ERROR_CODE(optimize_gap(loop, single_well(loop, 1.0), Direction::Minimize), ErrorCode::InvalidClass);
  CHECK_ERROR_CODE(constant_optimality_probe(loop, 1.0), ErrorCode::NotATree);
}
