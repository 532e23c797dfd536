#include <benchmark/benchmark.h>

#include "csb/cmaes.hpp"
#include "csb/ga.hpp"
#include "csb/stats.hpp"

using namespace csb;

namespace {

Objective cheap_sphere(const DomainTable& dom) {
  return [&dom](const DesignVector& v) {
    double f = 0.0;
    for (int i = 0; i < kGeneCount; ++i) {
      const double z = (v[i] - dom.midpoint(i)) / dom.width(i);
      f += z * z;
    }
    return Evaluation{-f, f, 0.0};
  };
}

}  // namespace

static void BM_GaGeneration(benchmark::State& state) {
  const DomainTable dom = DomainTable::standard();
  const Objective obj = cheap_sphere(dom);
  const int generations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    GAConfig cfg;
    cfg.generations = generations;
    cfg.seed = 3;
    const RunLog log = run_ga(dom, cfg, obj);
    benchmark::DoNotOptimize(log);
  }
  state.SetItemsProcessed(state.iterations() * generations * 10);
}
BENCHMARK(BM_GaGeneration)->Arg(100)->Arg(1000);

static void BM_CmaEsAskTell(benchmark::State& state) {
  CmaEsConfig cfg;
  cfg.seed = 5;
  CmaEs es(BoxDomain::from(DomainTable::standard()), cfg);
  Rng rng(7);
  for (auto _ : state) {
    const auto cands = es.ask();
    std::vector<double> fit;
    fit.reserve(cands.size());
    for (const auto& x : cands) fit.push_back(-x.squaredNorm());
    es.tell(cands, fit);
    benchmark::DoNotOptimize(es.state().sigma);
  }
  state.SetItemsProcessed(state.iterations() * cfg.lambda);
}
BENCHMARK(BM_CmaEsAskTell);

static void BM_MannWhitney30v30(benchmark::State& state) {
  Rng rng(11);
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) {
    a.push_back(rng.normal());
    b.push_back(0.5 + rng.normal());
  }
  for (auto _ : state) {
    const auto r = stats::mann_whitney_u(a, b);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MannWhitney30v30);

BENCHMARK_MAIN();
