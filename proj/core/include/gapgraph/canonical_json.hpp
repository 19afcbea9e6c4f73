#pragma once

#include <string>

#include <json.hpp>

namespace gapgraph {

/// Stable text form: keys sorted, two-space indent, floating-point numbers
/// printed with 12 significant digits, non-finite numbers as null.
std::string canonical_dump(const nlohmann::json& value);

/// A double as it appears in canonical output.
std::string format_number(double x);

}  // namespace gapgraph
