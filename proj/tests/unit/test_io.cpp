#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "check_error.hpp"
#include "gapgraph/canonical_json.hpp"
#include "gapgraph/io.hpp"

using namespace gapgraph;
using nlohmann::json;

namespace {
const char* kStep = R"({
  "vertices": ["c", "v1", "v2", "v4"],
  "edges": [
    {"id": "e1", "from": "c", "to": "v1", "length": 1},
    {"id": "e2", "from": "c", "to": "v2", "length": 2},
    {"id": "e4", "from": "c", "to": "v4", "length": 4}
  ],
  "conditions": {"v2": {"type": "delta", "alpha": 1.5}},
  "potential": [
    {"edge": "e4", "breakpoints": [0, 3, 4], "values": [0, 0, 5], "jumps": [{"at": 3, "left": 0, "right": 5}]}
  ]
})";
}  // namespace

TEST_CASE("problem files parse") {
  const Problem p = parse_problem(kStep);
  CHECK(p.graph.edge_count() == 3);
  CHECK(p.has_potential);
  CHECK_FALSE(p.perturbation.has_value());
  const EdgeId e4 = *p.graph.find_edge("e4");
  CHECK(p.potential.eval({e4, 2.0}) == 0.0);
  CHECK(p.potential.eval({e4, 3.5}) == doctest::Approx(5.0));
  CHECK(p.graph.condition(*p.graph.find_vertex("v2")).alpha == 1.5);
}

TEST_CASE("syntax errors carry a position") {
  try {
    (void)parse_problem("{\n  \"edges\": [\n    {\"id\": \"e\",, }\n  ]\n}");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("semantic errors keep their codes") {
  CHECK_ERROR_CODE(parse_problem(R"({"edges": [{"id": "e", "from": "a", "to": "b", "length": -1}]})"),
                   ErrorCode::NonPositiveLength);
  CHECK_ERROR_CODE(parse_problem(R"({"edges": [{"id": "e", "from": "a", "to": "b", "length": 1}],
                                    "potential": [{"edge": "x", "breakpoints": [0, 1], "values": [0, 0]}]})"),
                   ErrorCode::UnknownEdge);
  CHECK_ERROR_CODE(parse_problem(R"({"edges": [{"id": "e", "from": "a", "to": "b", "length": 1}],
                                    "potential": [{"edge": "e", "breakpoints": [0, 0.5], "values": [0, 0]}]})"),
                   ErrorCode::InvalidPotential);
  CHECK_ERROR_CODE(parse_problem(R"({"edges": [{"id": "e", "from": "a", "to": "b", "length": "one"}]})"),
                   ErrorCode::ParseError);
}

TEST_CASE("graph spec round trip is byte identical") {
  const Problem p = parse_problem(kStep);
  const std::string once = canonical_dump(to_json(p.spec));
  const Problem q = parse_problem(once);
  CHECK(canonical_dump(to_json(q.spec)) == once);
}

TEST_CASE("potential round trip") {
  const Problem p = parse_problem(kStep);
  const json blocks = to_json(p.graph, p.potential);
  const Potential back = potential_from_json(p.graph, blocks);
  CHECK(canonical_dump(to_json(p.graph, back)) == canonical_dump(blocks));
  CHECK(blocks[0]["jumps"].is_array());
  CHECK(blocks[0]["jumps"].empty());
  CHECK(blocks[2]["jumps"].size() == 1);
}

TEST_CASE("canonical formatting") {
  CHECK(format_number(std::numbers::pi * std::numbers::pi) == "9.86960440109");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.0) == "2");
  json j = {{"b", std::numeric_limits<double>::infinity()}, {"a", json::array()}, {"c", 0.5}};
  CHECK(canonical_dump(j) == "{\n  \"a\": [],\n  \"b\": null,\n  \"c\": 0.5\n}\n");
}

TEST_CASE("points") {
  const Problem p = parse_problem(kStep);
  const PointOnGraph x = point_from_json(p.graph, {{"edge", "e2"}, {"s", 0.25}});
  CHECK(to_json(x, p.graph) == json({{"edge", "e2"}, {"s", 0.25}}));
  CHECK_ERROR_CODE(point_from_json(p.graph, {{"edge", "e2"}, {"s", 3.0}}), ErrorCode::InvalidPoint);
}
