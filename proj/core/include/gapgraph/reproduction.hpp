#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gapgraph {

/// One compared quantity. `source` says where the reference comes from:
/// "published" (a printed value), "derived" (an independent closed form or
/// an artifact threshold), or "construction" (true by how the case is built).
struct ScenarioCheck {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  std::string source;
  /// "within": |computed - reference| <= tolerance. "below": computed < reference.
  /// "equal": exact match.
  std::string comparison = "within";
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<ScenarioCheck> checks;
  /// Sweep tables and intermediate values.
  nlohmann::json values = nlohmann::json::object();
  /// "parameter,lambda1,lambda2,gap" rows for sweeps; empty otherwise.
  std::string csv;
  double runtime_seconds = 0.0;
  bool passed() const noexcept;
};

/// Star with legs 1, 2, 4: zero-mean signed distance and its first-order test.
ScenarioReport repro_sigma_star();

/// Two legs of length 1/2 plus a pendant of length eps carrying q = t x.
ScenarioReport repro_gap_to_zero_convex(double eps = 0.05,
                                        std::vector<double> t_list = {0.0, 10.0, 100.0, 1e3, 1e4});

/// Two legs of length 1/2 plus n legs of length eps carrying q = M.
ScenarioReport repro_gap_to_zero_singlewell(double M = 20.0, double eps = 0.05,
                                            std::vector<int> n_list = {2, 4, 8, 16, 32});

/// Unit interval with n equally spaced stars of m legs of length delta, q = M_big on the legs.
ScenarioReport repro_gap_divergent(std::vector<int> n_list = {2, 3, 4}, int m = 20, double delta = 1e-3,
                                   double M_big = 1e5);

/// "sigma-star", "gap-to-zero-convex", "gap-to-zero-singlewell", "gap-divergent".
const std::vector<std::string>& scenario_names();
/// Default parameters. Throws BadFlags for an unknown name.
ScenarioReport run_scenario(std::string_view name);
/// Independent scenarios run concurrently; reports come back in input order.
std::vector<ScenarioReport> run_scenarios(const std::vector<std::string>& names);

nlohmann::json to_json(const ScenarioReport& r);
/// "PASS name: computed vs reference (tol, source)" per check.
std::string summary_lines(const ScenarioReport& r);

}  // namespace gapgraph
