#include <benchmark/benchmark.h>

#include "lrsp/instance.hpp"
#include "lrsp/solvers.hpp"

namespace {

using namespace lrsp;

SyntheticInstance completion(Index rank) {
  InstanceParams p;
  p.rows = 200;
  p.cols = 400;
  p.rank = rank;
  p.model = ObservationModel::mask(0.3);
  p.seed = 11;
  return generate_instance(p);
}

// Cost of a fixed number of iterations, so the numbers compare per-iteration work.
template <SolverResult (*Solve)(const ProblemSpec&, const SolverConfig&,
                                const std::optional<GroundTruth>&)>
void BM_Iterations(benchmark::State& state) {
  const auto inst = completion(state.range(0));
  SolverConfig cfg;
  cfg.max_iterations = 5;
  cfg.tolerance = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(Solve(inst.problem(), cfg, std::nullopt));
}
BENCHMARK_TEMPLATE(BM_Iterations, alps_solve)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Iterations, sparcs_solve)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_RpcaAlps(benchmark::State& state) {
  InstanceParams p;
  p.rows = 100;
  p.cols = 100;
  p.rank = 2;
  p.sparsity = 100;
  p.model = ObservationModel::identity();
  p.seed = 12;
  const auto inst = generate_instance(p);
  for (auto _ : state) benchmark::DoNotOptimize(alps_solve(inst.problem(), SolverConfig{}));
}
BENCHMARK(BM_RpcaAlps)->Unit(benchmark::kMillisecond);

}  // namespace
