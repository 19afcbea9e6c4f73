#include "gapgraph/canonical_json.hpp"

#include <cmath>
#include <cstdio>

namespace gapgraph {

namespace {

void emit(const nlohmann::json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + nlohmann::json(key).dump() + ": ";
        emit(item, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(v[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_number(v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string canonical_dump(const nlohmann::json& value) {
  std::string out;
  emit(value, 0, out);
  out += "\n";
  return out;
}

}  // namespace gapgraph
