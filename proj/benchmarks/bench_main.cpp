#include <benchmark/benchmark.h>

#include <vector>

#include "gapgraph/optimizer.hpp"
#include "gapgraph/perturbation.hpp"
#include "gapgraph/secular.hpp"
#include "gapgraph/spectral.hpp"

using namespace gapgraph;

namespace {

MetricGraph star124() {
  GraphSpec s;
  s.vertices = {"c", "v1", "v2", "v4"};
  s.edges = {{"e1", "c", "v1", 1.0}, {"e2", "c", "v2", 2.0}, {"e4", "c", "v4", 4.0}};
  return MetricGraph::build(s);
}

void BM_Gap(benchmark::State& state) {
  const MetricGraph g = star124();
  const Potential q = distance_field(g, {EdgeId{0}, 0.5});
  SolveOptions o;
  o.mesh.per_shortest = static_cast<std::size_t>(state.range(0));
  o.mesh.max_per_edge = 1 << 16;
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_gap(g, q, o));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gap)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SecularRoot(benchmark::State& state) {
  const std::vector<double> legs{1.0, 2.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(star_secular_root(legs));
}
BENCHMARK(BM_SecularRoot);

void BM_FhTest(benchmark::State& state) {
  const MetricGraph g = star124();
  const Potential zero = Potential::constant(g, 0.0);
  const Potential p = tent(g, {EdgeId{2}, 2.0}, 0.5);
  const PotentialClass cls = convex_on_leaf_paths(g, 10.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(certify_non_optimal(g, zero, cls, p, Direction::Minimize).integral);
}
BENCHMARK(BM_FhTest)->Unit(benchmark::kMillisecond);

void BM_OptimizeShort(benchmark::State& state) {
  const MetricGraph g = star124();
  OptimizeOptions o;
  o.budget = 200;
  o.restarts = 1;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_gap(g, single_well(g, 20.0), Direction::Minimize, o).gamma_star);
}
BENCHMARK(BM_OptimizeShort)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
