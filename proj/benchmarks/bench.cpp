#include <benchmark/benchmark.h>

#include "ruggeri/modes.hpp"
#include "ruggeri/sim1d.hpp"

using namespace ruggeri;

namespace {

RunConfig scenario(SystemKind kind, int n_cells) {
  RunConfig c;
  c.kind = kind;
  c.params = {1.0, 1.5, 10.0, 1.0, 1.0, 1.0};
  if (kind == SystemKind::E4) {
    c.params.delta = c.params.chi = 0.0;
    c.reference = to_vector(StateE4{1.0, 0.0, 1.0, 0.0});
  } else {
    c.reference = to_vector(StateE5{2.0, 0.0, 1.0, 0.0, 0.0});
  }
  c.perturbation = {0.05, 1.0, {}};
  c.grid = {n_cells, 0.0, 4.0};
  return c;
}

void BM_Step(benchmark::State& st, SystemKind kind) {
  const RunConfig c = scenario(kind, static_cast<int>(st.range(0)));
  const auto sys = build_system(kind, c.params);
  const FieldSet f = initial_data(c);
  const double dt = stable_dt(f, sys, 0.4);
  for (auto _ : st) benchmark::DoNotOptimize(step(f, sys, dt));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK_CAPTURE(BM_Step, e4, SystemKind::E4)->Arg(1024)->Arg(4096);
BENCHMARK_CAPTURE(BM_Step, e5, SystemKind::E5)->Arg(1024)->Arg(4096);

void BM_SpeedsGeneric(benchmark::State& st) {
  const auto sys = build_system(SystemKind::E5, {1.0, 1.5, 1.0, 1.0, 1.0, 1.0});
  Vec v(5);
  v << 2.0, 0.1, 1.0, 0.05, 0.02;
  for (auto _ : st) benchmark::DoNotOptimize(speeds_generic(sys, v));
}
BENCHMARK(BM_SpeedsGeneric);

void BM_Pi0Report(benchmark::State& st) {
  const FluidParams p{1.0, 1.5, 1.0, 1.0, 1.0, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(pi0_report(p, 0.5, 1.0));
}
BENCHMARK(BM_Pi0Report);

}  // namespace

BENCHMARK_MAIN();
