#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/oracles.hpp"
#include "check_error.hpp"
#include "gapgraph/perturbation.hpp"

using namespace gapgraph;
using namespace gapgraph::testing;

TEST_CASE("middle-third indicator on the unit interval") {
  // u1 = 1, u2 = sqrt 2 cos(pi x): int_{1/3}^{2/3} cos(2 pi x) dx = -sqrt 3 / (2 pi)
  const MetricGraph g = interval(1.0);
  const Potential P = indicator(g, EdgeId{0}, 1.0 / 3.0, 2.0 / 3.0);
  const SpectrumResult r = solve_spectrum(g, Potential::constant(g, 0.0), SolveOptions{.k = 3});
  const FHValue v = fh_integral(r, P, g);
  const double exact = -std::sqrt(3.0) / (2.0 * std::numbers::pi);
  CHECK(v.value == doctest::Approx(exact).epsilon(1e-5));
  CHECK(v.error < 1e-6);
  // the certification margin uses ten times the estimate
  CHECK(std::abs(v.value - exact) < 10.0 * v.error);
}

TEST_CASE("first-order value matches a central difference of the gap") {
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const Potential q = distance_field(g, {EdgeId{1}, 0.5}) * 0.3;
  const Potential P = tent(g, {EdgeId{2}, 1.0}, 0.7);
  const Potential* both[] = {&q, &P};
  const Mesh mesh = build_mesh(g, both);
  const SolveOptions o{.k = 3};
  const double fh = fh_integral(solve_spectrum(g, q, mesh, o), P, g).value;
  const double t = 1e-4;
  const double fd = (solve_spectrum(g, q + P * t, mesh, o).gap() - solve_spectrum(g, q - P * t, mesh, o).gap()) / (2 * t);
  CHECK(fd == doctest::Approx(fh).epsilon(1e-4));
}

TEST_CASE("degenerate second eigenvalue needs the matrix form") {
  const MetricGraph g = star_graph({1.0, 1.0, 1.0});
  const SpectrumResult r = solve_spectrum(g, Potential::constant(g, 0.0), SolveOptions{.k = 5});
  const Potential P = indicator(g, EdgeId{0}, 0.5, 1.0);
  CHECK_ERROR_CODE(fh_integral(r, P, g), ErrorCode::DegenerateSecond);
  const FHMatrix m = fh_matrix(r, P);
  REQUIRE(m.multiplicity == 2);
  CHECK(m.entries[0][1] == doctest::Approx(m.entries[1][0]));
  CHECK(m.eigenvalues[0] <= m.eigenvalues[1]);
  // trace is basis independent: sum of int P u2^(j)^2 - 2 int P u1^2
  const auto& mesh = r.fine.mesh;
  double trace = 0.0;
  for (std::size_t j : r.cluster(1))
    trace += weighted_integral(mesh, r.eigenfunction(j), r.eigenfunction(j), P) -
             weighted_integral(mesh, r.eigenfunction(0), r.eigenfunction(0), P);
  CHECK(m.eigenvalues[0] + m.eigenvalues[1] == doctest::Approx(trace).epsilon(1e-6));
}

TEST_CASE("sigma on the 1-2-4 star certifies that q = 0 is not minimal") {
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const PointOnGraph x0{EdgeId{2}, 11.0 / 14.0};
  const Potential sigma = signed_distance(g, x0, {remove_point(g, x0).after_component}).sigma;
  const Potential zero = Potential::constant(g, 0.0);
  const ConvexOnPaths cls = convex_on_leaf_paths(g, 10.0);

  CertifyOptions opts;
  opts.normalization = Normalization::unit_at(VertexId{3});
  const FHReport rep = certify_non_optimal(g, zero, cls, sigma, Direction::Minimize, opts);
  CHECK(rep.verdict == Verdict::NotMinimal);
  CHECK(rep.integral == doctest::Approx(-1.46034).epsilon(1e-3));
  REQUIRE(rep.range.has_value());
  CHECK(rep.range->t_max > 0.0);

  // constructive confirmation: a small admissible step lowers the gap
  const double t = std::min(1e-3, 0.5 * rep.range->t_max);  // curvature wins beyond about 0.02
  CHECK(fundamental_gap(g, zero + sigma * t) < fundamental_gap(g, zero));

  // -sigma is concave, so only t > 0 is admissible and a negative value says nothing about maxima
  const FHReport mx = certify_non_optimal(g, zero, cls, sigma, Direction::Maximize, opts);
  CHECK(rep.range->t_min == 0.0);
  CHECK(mx.verdict == Verdict::Inconclusive);
}

TEST_CASE("normalization changes scale; the sign survives for zero-mean directions") {
  // u1 is constant at q = 0, so a zero-mean P sees only u2^2 and rescaling u2 cannot flip the sign
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const SpectrumResult r = solve_spectrum(g, Potential::constant(g, 0.0), SolveOptions{.k = 3});
  const PointOnGraph x0{EdgeId{2}, 11.0 / 14.0};
  const Potential sigma = signed_distance(g, x0, {remove_point(g, x0).after_component}).sigma;
  const double l2 = fh_integral(r, sigma, g).value;
  const double at = fh_integral(r, sigma, g, Normalization::unit_at(VertexId{3})).value;
  CHECK(l2 * at > 0.0);
  CHECK_FALSE(std::abs(l2 - at) < 1e-6);

  // a direction with nonzero mean can change sign
  const Potential P = indicator(g, EdgeId{0}, 0.0, 1.0);
  CHECK(fh_integral(r, P, g).value != doctest::Approx(fh_integral(r, P, g, Normalization::unit_at(VertexId{3})).value));
}

TEST_CASE("interior tent at q = 0 is inconclusive") {
  const MetricGraph g = interval(1.0);
  const Potential P = tent(g, {EdgeId{0}, 0.5}, 0.2);
  const FHReport rep = certify_non_optimal(g, Potential::constant(g, 0.0), convex_on_leaf_paths(g, 5.0), P,
                                           Direction::Minimize);
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("base potential outside the class") {
  const MetricGraph g = interval(1.0);
  const Potential q = tent(g, {EdgeId{0}, 0.5}, 0.2);
  CHECK_ERROR_CODE(certify_non_optimal(g, q, convex_on_leaf_paths(g, 5.0), q, Direction::Minimize),
                   ErrorCode::NotInClass);
}

TEST_CASE("verdicts use the L2 values whatever the reported normalization") {
  // q = 5 on the far part of the long leg, P = 1 on the outer half of the short leg
  const MetricGraph g = star_graph({1.0, 2.0, 4.0});
  const Potential q = Potential::from_pieces(g, {{{0.0, 1.0, 0.0, 0.0}},
                                                 {{0.0, 2.0, 0.0, 0.0}},
                                                 {{0.0, 3.0, 0.0, 0.0}, {3.0, 4.0, 5.0, 5.0}}});
  const Potential P = indicator(g, EdgeId{0}, 0.5, 1.0);
  CertifyOptions opts;
  opts.normalization = Normalization::unit_at(VertexId{3});
  const FHReport rep = certify_non_optimal(g, q, single_well(g, 10.0), P, Direction::Minimize, opts);
  REQUIRE(rep.matrix.eigenvalues.size() == 1);
  // u1 is not constant, so rescaling u2 flips the sign here
  CHECK(rep.integral > 0.0);
  CHECK(rep.matrix.eigenvalues[0] < 0.0);
  CHECK(rep.margin == doctest::Approx(10.0 * (rep.matrix.errors[0] + 1e-9 * 2.0)));
  CHECK(rep.verdict == Verdict::NotMinimal);
}
