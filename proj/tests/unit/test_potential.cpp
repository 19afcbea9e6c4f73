#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "check_error.hpp"
#include "gapgraph/potential.hpp"

using namespace gapgraph;
using testing::path_graph;
using testing::star_graph;

TEST_CASE("piecewise evaluation with a jump reports right limits") {
  const MetricGraph g = path_graph({2.0});
  const Potential q = Potential::from_pieces(g, {{{0.0, 1.0, 0.0, 1.0}, {1.0, 2.0, 3.0, 3.0}}});
  CHECK(q.eval({EdgeId{0}, 0.5}) == doctest::Approx(0.5));
  CHECK(q.eval({EdgeId{0}, 1.0}) == doctest::Approx(3.0));
  CHECK(q.left_limit(EdgeId{0}, 1.0) == doctest::Approx(1.0));
  CHECK(q.right_limit(EdgeId{0}, 1.0) == doctest::Approx(3.0));
  CHECK(q.integral() == doctest::Approx(0.5 + 3.0));
  CHECK(q.min_value() == 0.0);
  CHECK(q.max_value() == 3.0);
  CHECK(q.breakpoints(EdgeId{0}) == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("from_pieces validates tiling") {
  const MetricGraph g = path_graph({1.0});
  CHECK_ERROR_CODE(Potential::from_pieces(g, {{{0.0, 0.5, 0.0, 0.0}}}), ErrorCode::InvalidPotential);
  CHECK_ERROR_CODE(Potential::from_pieces(g, {{{0.0, 0.4, 0.0, 0.0}, {0.5, 1.0, 0.0, 0.0}}}),
                   ErrorCode::InvalidPotential);
  CHECK_ERROR_CODE(Potential::from_pieces(g, {}), ErrorCode::InvalidPotential);
}

TEST_CASE("arithmetic merges breakpoints") {
  const MetricGraph g = path_graph({1.0});
  const Potential a = Potential::from_pieces(g, {{{0.0, 0.3, 1.0, 1.0}, {0.3, 1.0, 2.0, 2.0}}});
  const Potential b = ramp(g, EdgeId{0}, 0.5, 1.0, 2.0);
  const Potential c = a + b * 0.5;
  CHECK(c.breakpoints(EdgeId{0}).size() == 4);
  CHECK(c.eval({EdgeId{0}, 0.75}) == doctest::Approx(2.0 + 0.5 * 2.0 * 0.25));
  CHECK((c - c).sup_norm() == doctest::Approx(0.0));
  CHECK(a.shifted(-1.0).min_value() == doctest::Approx(0.0));
  CHECK(Potential::constant(g, 2.0).simplified().pieces(EdgeId{0}).size() == 1);
}

TEST_CASE("split and extend carry values over") {
  const MetricGraph g = path_graph({1.0, 2.0});
  const Potential q = ramp(g, EdgeId{1}, 0.0, 2.0, 1.0);
  const Potential s = split_potential(q, EdgeId{1}, 0.5);
  CHECK(s.edge_count() == 3);
  CHECK(s.eval({EdgeId{1}, 0.25}) == doctest::Approx(0.25));
  CHECK(s.eval({EdgeId{2}, 1.0}) == doctest::Approx(1.5));
  CHECK(s.integral() == doctest::Approx(q.integral()));
  const Potential e = extend_potential(q, 0.1, 7.0);
  CHECK(e.edge_count() == 3);
  CHECK(e.eval({EdgeId{2}, 0.05}) == 7.0);
}

TEST_CASE("distance field on a star is exact") {
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const PointOnGraph x0{EdgeId{2}, 1.5};
  const Potential d = distance_field(g, x0);
  for (double s : {0.0, 0.3, 1.0}) CHECK(d.eval({EdgeId{0}, s}) == doctest::Approx(1.5 + s));
  for (double s : {0.0, 1.0, 1.5, 3.0, 4.0}) CHECK(d.eval({EdgeId{2}, s}) == doctest::Approx(std::abs(s - 1.5)));
  // int over e1: 1.5 + 0.5, e2: 3 + 2, e4: 1.125 + 3.125
  CHECK(d.integral() == doctest::Approx(2.0 + 5.0 + 1.125 + 3.125));
}

TEST_CASE("tent is one at the center and vanishes past the halfwidth") {
  const MetricGraph g = star_graph({1.0, 1.0, 1.0});
  const Potential t = tent(g, g.point_at(VertexId{0}), 0.5);
  CHECK(t.eval({EdgeId{0}, 0.0}) == doctest::Approx(1.0));
  CHECK(t.eval({EdgeId{1}, 0.25}) == doctest::Approx(0.5));
  CHECK(t.eval({EdgeId{2}, 0.75}) == doctest::Approx(0.0));
  CHECK(t.integral() == doctest::Approx(3 * 0.25));
}

TEST_CASE("signed distance has zero mean at 11/14 on the 1-2-4 star") {
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const PointOnGraph x0{EdgeId{2}, 11.0 / 14.0};
  const PointRemoval r = remove_point(g, x0);
  const SignedDistance sd = signed_distance(g, x0, {r.after_component});
  CHECK(std::abs(sd.sigma.integral()) < 1e-12);
  CHECK(sd.minus_is_interval);
  REQUIRE(sd.convex_on_leaf_paths.has_value());
  CHECK(*sd.convex_on_leaf_paths);
  CHECK(sd.sigma.eval({EdgeId{2}, 4.0}) == doctest::Approx(-(4.0 - 11.0 / 14.0)));
  CHECK(sd.sigma.eval({EdgeId{0}, 1.0}) == doctest::Approx(1.0 + 11.0 / 14.0));
  CHECK_ERROR_CODE(signed_distance(g, x0, {7}), ErrorCode::InvalidPoint);
}

TEST_CASE("indicator and ramp reject bad intervals") {
  const MetricGraph g = path_graph({1.0});
  CHECK_ERROR_CODE(indicator(g, EdgeId{0}, 0.6, 0.4), ErrorCode::InvalidPoint);
  CHECK_ERROR_CODE(ramp(g, EdgeId{0}, 0.0, 1.5, 1.0), ErrorCode::InvalidPoint);
  CHECK(indicator(g, EdgeId{0}, 0.25, 0.75).integral() == doctest::Approx(0.5));
}
