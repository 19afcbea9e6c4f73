#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapgraph/canonical_json.hpp"
#include "gapgraph/classes.hpp"
#include "gapgraph/error.hpp"
#include "gapgraph/io.hpp"
#include "gapgraph/optimizer.hpp"
#include "gapgraph/perturbation.hpp"
#include "gapgraph/reproduction.hpp"
#include "gapgraph/spectral.hpp"

namespace gapgraph::cli {

namespace {

using nlohmann::json;

struct Flags {
  std::string graph;
  std::string out;
  std::size_t k = 0;
  std::string cls = "convex";
  double M = 0.0;
  std::string tree;
  std::uint64_t seed = 0;
  std::size_t budget = 4000;
  int restarts = 8;
  unsigned threads = 0;
  std::optional<double> tol;
  bool modulo = false;
  std::string direction = "minimize";
  std::string perturbation;
  std::string normalize_at;
  std::string trace;
  std::string csv;
  bool functions = false;
  bool diagnostics = false;
  bool stationarity = false;
  bool no_extrapolate = false;
  std::size_t mesh_min = MeshOptions{}.min_per_edge;
  std::size_t mesh_per_shortest = MeshOptions{}.per_shortest;
  std::size_t mesh_max = MeshOptions{}.max_per_edge;
  std::string scenario = "all";
};

SolveOptions solve_options(const Flags& f, std::size_t default_k) {
  SolveOptions s;
  s.k = f.k ? f.k : default_k;
  s.mesh = {f.mesh_min, f.mesh_per_shortest, f.mesh_max};
  s.extrapolate = !f.no_extrapolate;
  s.eigen.seed = f.seed;
  return s;
}

std::vector<EdgeId> edge_list(const MetricGraph& g, const std::string& names) {
  std::vector<EdgeId> out;
  std::stringstream in(names);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    const auto e = g.find_edge(name);
    if (!e) throw Error(ErrorCode::UnknownEdge, "unknown edge " + name);
    out.push_back(*e);
  }
  return out;
}

PotentialClass make_class(const MetricGraph& g, const Flags& f) {
  if (!(f.M > 0.0)) throw Error(ErrorCode::BadFlags, "--M must be positive");
  PotentialClass cls;
  if (f.cls == "convex")
    cls = convex_on_leaf_paths(g, f.M);
  else
    cls = single_well(g, f.M, edge_list(g, f.tree));
  validate_class(g, cls);
  return cls;
}

Direction make_direction(const Flags& f) {
  return f.direction == "maximize" ? Direction::Maximize : Direction::Minimize;
}

void emit(const json& report, const Flags& f, std::ostream& out) {
  const std::string text = canonical_dump(report) + "\n";
  if (f.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.out);
  if (!file) throw Error(ErrorCode::BadFlags, "cannot write " + f.out);
  file << text;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::BadFlags, "cannot write " + path);
  file << text;
}

int cmd_eig(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const SpectrumResult r = solve_spectrum(p.graph, p.potential, solve_options(f, 2));
  json j = to_json(r, p.graph, f.functions);
  if (f.diagnostics && r.count() >= 2) j["diagnostics"] = to_json(eigen_diagnostics(r, p.graph), p.graph);
  emit(j, f, out);
  return kOk;
}

int cmd_gap(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const SpectrumResult r = solve_spectrum(p.graph, p.potential, solve_options(f, 3));
  json j{{"gap", r.gap()},
         {"lambda1", r.eigenvalues[0]},
         {"lambda2", r.eigenvalues[1]},
         {"error_estimate", r.error_estimates[0] + r.error_estimates[1]},
         {"multiplicity2", r.cluster(1).size()}};
  emit(j, f, out);
  return kOk;
}

int cmd_classcheck(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const PotentialClass cls = make_class(p.graph, f);
  const ShiftPolicy policy = f.modulo ? ShiftPolicy::ModuloConstants : ShiftPolicy::Literal;
  json j{{"class", f.cls}, {"M", f.M}, {"policy", f.modulo ? "modulo-constants" : "literal"}};
  bool accepted = false;
  if (const auto* c = std::get_if<ConvexOnPaths>(&cls)) {
    const ConvexVerdict v = check_convex_on_paths(p.graph, p.potential, *c, f.tol, policy);
    accepted = v.accepted;
    j["reason"] = v.reason;
    j["witness"] = nullptr;
    if (v.witness) {
      j["witness"] = json::array();
      for (const auto& x : *v.witness) j["witness"].push_back(to_json(x, p.graph));
    }
  } else {
    const SingleWellVerdict v = check_single_well(p.graph, p.potential, std::get<SingleWell>(cls), f.tol, policy);
    accepted = v.accepted;
    j["reason"] = v.reason;
    j["well"] = v.well ? to_json(v.well->point, p.graph) : json(nullptr);
  }
  j["accepted"] = accepted;
  emit(j, f, out);
  return accepted ? kOk : kVerdict;
}

Potential load_perturbation(const Problem& p, const Flags& f) {
  if (f.perturbation.empty()) {
    if (!p.perturbation) throw Error(ErrorCode::BadFlags, "no --perturbation file and no \"perturbation\" block");
    return *p.perturbation;
  }
  std::ifstream in(f.perturbation);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + f.perturbation);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::ParseError, f.perturbation + ": malformed JSON");
  }
  if (j.is_object() && j.contains("perturbation")) j = j["perturbation"];
  return potential_from_json(p.graph, j);
}

int cmd_fh(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const PotentialClass cls = make_class(p.graph, f);
  const Potential P = load_perturbation(p, f);
  CertifyOptions opts;
  opts.solve = solve_options(f, 6);
  if (!f.normalize_at.empty()) {
    const auto v = p.graph.find_vertex(f.normalize_at);
    if (!v) throw Error(ErrorCode::UnknownVertex, "unknown vertex " + f.normalize_at);
    opts.normalization = Normalization::unit_at(*v);
  }
  const FHReport r = certify_non_optimal(p.graph, p.potential, cls, P, make_direction(f), opts);
  emit(to_json(r), f, out);
  return r.verdict == Verdict::Inconclusive ? kVerdict : kOk;
}

int cmd_optimize(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const PotentialClass cls = make_class(p.graph, f);
  OptimizeOptions opts;
  opts.budget = f.budget;
  opts.restarts = f.restarts;
  opts.seed = f.seed;
  opts.threads = f.threads;
  opts.final_solve = solve_options(f, 4);
  const OptimizationResult r = optimize_gap(p.graph, cls, make_direction(f), opts);
  json j{{"result", to_json(r, p.graph)}};
  bool ok = r.converged;
  if (f.stationarity) {
    StationarityOptions so;
    so.seed = f.seed;
    so.direction = r.direction;
    const StationarityReport s = stationarity_check(p.graph, r.q_star, cls, so);
    j["stationarity"] = to_json(s);
    ok = ok && s.passed;
  }
  if (!f.trace.empty()) {
    std::ostringstream csv;
    csv << "evaluation,restart,gamma\n";
    for (const auto& t : r.trace) csv << t.evaluation << ',' << t.restart << ',' << format_number(t.gamma) << '\n';
    write_text(f.trace, csv.str());
  }
  emit(j, f, out);
  return ok ? kOk : kVerdict;
}

int cmd_audit(const Flags& f, std::ostream& out) {
  const Problem p = load_problem(f.graph);
  const BoundAudit b = bound_audit(p.graph, p.potential, solve_options(f, 2));
  json j{{"bounds", to_json(b)}};
  if (f.M > 0.0 && p.graph.is_tree())
    j["constant_probe"] = to_json(constant_optimality_probe(p.graph, f.M, solve_options(f, 6)), p.graph);
  emit(j, f, out);
  return b.passed() ? kOk : kVerdict;
}

int cmd_reproduce(const Flags& f, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> names =
      f.scenario == "all" ? scenario_names() : std::vector<std::string>{f.scenario};
  const auto reports = run_scenarios(names);
  bool ok = true;
  std::string csv;
  json j;
  if (reports.size() == 1) {
    j = to_json(reports.front());
  } else {
    j = {{"reports", json::array()}};
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
  }
  for (const auto& r : reports) {
    ok = ok && r.passed();
    err << summary_lines(r);
    if (!r.csv.empty()) csv += (reports.size() > 1 ? "# " + r.name + "\n" : std::string()) + r.csv;
  }
  if (!f.csv.empty()) write_text(f.csv, csv);
  emit(j, f, out);
  return ok ? kOk : kVerdict;
}

void add_solve_flags(CLI::App* sub, Flags& f, bool with_k) {
  if (with_k) sub->add_option("--k", f.k, "Number of eigenpairs");
  sub->add_option("--mesh-min", f.mesh_min, "Minimum elements per edge")->check(CLI::PositiveNumber);
  sub->add_option("--mesh-per-shortest", f.mesh_per_shortest, "Elements on the shortest edge")
      ->check(CLI::PositiveNumber);
  sub->add_option("--mesh-max", f.mesh_max, "Cap on elements per edge")->check(CLI::PositiveNumber);
  sub->add_flag("--no-extrapolate", f.no_extrapolate, "Skip two-level Richardson extrapolation");
  sub->add_option("--seed", f.seed, "Random seed");
}

void add_graph_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--graph", f.graph, "Graph JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Write the report here instead of stdout");
}

void add_class_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--class", f.cls, "Potential class")
      ->check(CLI::IsMember({"convex", "singlewell"}))
      ->capture_default_str();
  sub->add_option("--M", f.M, "Class bound")->required();
  sub->add_option("--tree", f.tree, "Comma-separated edges of the single-well tree (default: all)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Spectral gap toolkit for Schrodinger operators on metric graphs", "gapgraph"};
  app.require_subcommand(1, 1);

  auto* eig = app.add_subcommand("eig", "Lowest eigenpairs");
  add_graph_flags(eig, f);
  add_solve_flags(eig, f, true);
  eig->add_flag("--functions", f.functions, "Include nodal eigenfunctions");
  eig->add_flag("--diagnostics", f.diagnostics, "Zero counts of u2^2 - u1^2 per edge");

  auto* gap = app.add_subcommand("gap", "Fundamental gap");
  add_graph_flags(gap, f);
  add_solve_flags(gap, f, true);

  auto* classcheck = app.add_subcommand("classcheck", "Test class membership of the potential");
  add_graph_flags(classcheck, f);
  add_class_flags(classcheck, f);
  classcheck->add_option("--tol", f.tol, "Absolute tolerance");
  classcheck->add_flag("--modulo-constants", f.modulo, "Accept q when a constant shift is in the class");

  auto* fh = app.add_subcommand("fh", "First-order optimality test along a perturbation");
  add_graph_flags(fh, f);
  add_class_flags(fh, f);
  add_solve_flags(fh, f, true);
  fh->add_option("--perturbation", f.perturbation, "JSON file with the perturbation blocks");
  fh->add_option("--direction", f.direction)->check(CLI::IsMember({"minimize", "maximize"}));
  fh->add_option("--normalize-at", f.normalize_at, "Scale u2 to 1 at this vertex");

  auto* optimize = app.add_subcommand("optimize", "Optimize the gap over the class");
  add_graph_flags(optimize, f);
  add_class_flags(optimize, f);
  add_solve_flags(optimize, f, true);
  optimize->add_option("--direction", f.direction)->check(CLI::IsMember({"minimize", "maximize"}));
  optimize->add_option("--budget", f.budget, "Gap evaluations")->check(CLI::PositiveNumber);
  optimize->add_option("--restarts", f.restarts)->check(CLI::PositiveNumber);
  optimize->add_option("--threads", f.threads, "Worker threads (0: GAPGRAPH_THREADS or all cores)");
  optimize->add_option("--trace", f.trace, "Write the search trace as CSV");
  optimize->add_flag("--stationarity", f.stationarity, "Probe the optimizer output with first-order tests");

  auto* audit = app.add_subcommand("audit", "Diameter bounds and constant-potential probes");
  add_graph_flags(audit, f);
  add_solve_flags(audit, f, false);
  audit->add_option("--M", f.M, "Class bound for the constant-potential probes");

  auto* reproduce = app.add_subcommand("reproduce", "Run a worked example or counterexample family");
  std::vector<std::string> choices = scenario_names();
  choices.push_back("all");
  reproduce->add_option("name", f.scenario, "Scenario")->check(CLI::IsMember(choices));
  reproduce->add_option("--out", f.out, "Write the report here instead of stdout");
  reproduce->add_option("--csv", f.csv, "Write sweep data as CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "BadFlags: " << e.what() << "\n";
    return kError;
  }

  try {
    if (eig->parsed()) return cmd_eig(f, out);
    if (gap->parsed()) return cmd_gap(f, out);
    if (classcheck->parsed()) return cmd_classcheck(f, out);
    if (fh->parsed()) return cmd_fh(f, out);
    if (optimize->parsed()) return cmd_optimize(f, out);
    if (audit->parsed()) return cmd_audit(f, out);
    if (reproduce->parsed()) return cmd_reproduce(f, out, err);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace gapgraph::cli
