#include <benchmark/benchmark.h>

#include "csb/design_space.hpp"
#include "csb/evaluator.hpp"
#include "csb/harness.hpp"
#include "csb/rng.hpp"

using namespace csb;

static void BM_Evaluate(benchmark::State& state) {
  const Evaluator ev;
  const DomainTable dom = DomainTable::standard();
  Rng rng(1);
  std::vector<DesignVector> designs;
  for (int i = 0; i < 64; ++i) designs.push_back(sample_uniform(dom, rng));
  std::size_t i = 0;
  for (auto _ : state) {
    const EvaluationResult r = ev.evaluate(designs[i++ % designs.size()]);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Evaluate);

static void BM_EvaluateReference(benchmark::State& state) {
  const Evaluator ev;
  const DesignVector& v = ReferenceDesign::standard_genome();
  for (auto _ : state) {
    const EvaluationResult r = ev.evaluate(v);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EvaluateReference);

static void BM_Decode(benchmark::State& state) {
  const DomainTable dom = DomainTable::standard();
  Rng rng(2);
  const DesignVector v = sample_uniform(dom, rng);
  for (auto _ : state) {
    const BridgeGeometry g = decode(v, FixedParams{});
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_Decode);

static void BM_StaticSolve(benchmark::State& state) {
  const Evaluator ev;
  const BridgeGeometry g =
      decode(ReferenceDesign::standard_genome(), ev.fixed(), ev.scales());
  const BridgeModel bm = ev.build_model(g);
  const LoadSet loads = ev.loads_for(bm, g, LoadCase::live);
  for (auto _ : state) {
    const AnalysisResult r = solve_static(bm.model, loads);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_StaticSolve);

BENCHMARK_MAIN();
