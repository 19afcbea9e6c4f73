#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gapgraph/classes.hpp"
#include "gapgraph/graph.hpp"
#include "gapgraph/optimizer.hpp"
#include "gapgraph/perturbation.hpp"
#include "gapgraph/potential.hpp"
#include "gapgraph/spectral.hpp"

namespace gapgraph {

/// A graph file: the GraphSpec plus an optional potential block.
struct Problem {
  GraphSpec spec;
  MetricGraph graph;
  Potential potential;  // zero where the file gives none
  bool has_potential = false;
  /// Optional "perturbation" block, same format as "potential".
  std::optional<Potential> perturbation;
};

/// Syntax errors carry "line L, column C". Throws ParseError or the graph's own error codes.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::filesystem::path& path);

GraphSpec graph_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GraphSpec& spec);

/// Per-edge blocks {"edge","breakpoints","values","jumps"}; edges not listed are zero.
Potential potential_from_json(const MetricGraph& g, const nlohmann::json& blocks);
nlohmann::json to_json(const MetricGraph& g, const Potential& q);

nlohmann::json to_json(PointOnGraph x, const MetricGraph& g);
PointOnGraph point_from_json(const MetricGraph& g, const nlohmann::json& j);

nlohmann::json to_json(const SpectrumResult& r, const MetricGraph& g, bool with_functions = true);
nlohmann::json to_json(const Diagnostics& d, const MetricGraph& g);
nlohmann::json to_json(const FHReport& r);
nlohmann::json to_json(const AdmissibleRange& r);
nlohmann::json to_json(const OptimizationResult& r, const MetricGraph& g);
nlohmann::json to_json(const StationarityReport& r);
nlohmann::json to_json(const ConstantProbeReport& r, const MetricGraph& g);
nlohmann::json to_json(const BoundAudit& r);

/// "parameter,lambda1,lambda2,gap" rows.
std::string sweep_csv(const std::vector<std::array<double, 4>>& rows, const std::string& parameter);

}  // namespace gapgraph
