#include <benchmark/benchmark.h>

#include "sparsekm/isee.hpp"
#include "sparsekm/iterate.hpp"
#include "sparsekm/lasso.hpp"
#include "sparsekm/sdp.hpp"
#include "sparsekm/simgen.hpp"
#include "sparsekm/spectral.hpp"

using namespace sparsekm;

namespace {

Dataset scenario1(int p, int n, uint64_t seed) {
  ScenarioSpec spec;
  spec.scenario = Scenario::Isotropic;
  spec.p = p;
  spec.n = n;
  spec.s = std::min(10, p);
  spec.separation = 5.0;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

static void BM_SdpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dataset ds = scenario1(10, n, 42);
  SdpProblem prob;
  prob.A = symmetrized(ds.X.transpose() * ds.X);
  prob.K = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(prob));
  }
}
BENCHMARK(BM_SdpSolve)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SdpSolveWarm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Dataset ds = scenario1(10, n, 42);
  SdpProblem prob;
  prob.A = symmetrized(ds.X.transpose() * ds.X);
  prob.K = 2;
  SdpOptions opts;
  opts.warm_start = membership_from_labels(*ds.truth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(prob, opts));
  }
}
BENCHMARK(BM_SdpSolveWarm)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SpectralRaw(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const Dataset ds = scenario1(p, 200, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_cluster(AffinityInput::raw_data(ds.X), 2, 3));
  }
}
BENCHMARK(BM_SpectralRaw)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_LassoPath(benchmark::State& state) {
  const int m = 250, q = static_cast<int>(state.range(0));
  Rng rng(5);
  Matrix x(m, q);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < q; ++j) x(i, j) = rng.normal();
  Vector y = x.col(0) - 0.5 * x.col(1);
  for (int i = 0; i < m; ++i) y(i) += 0.3 * rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(lasso_path(x, y));
  }
}
BENCHMARK(BM_LassoPath)->Arg(48)->Arg(98)->Unit(benchmark::kMillisecond);

static void BM_Isee(benchmark::State& state) {
  ScenarioSpec spec;
  spec.scenario = Scenario::ChainPrecision;
  spec.p = static_cast<int>(state.range(0));
  spec.n = 500;
  spec.s = 10;
  spec.separation = 4.0;
  spec.rho = 0.45;
  spec.seed = 1;
  const Dataset ds = generate(spec);
  auto groups = ds.truth->groups();
  for (auto _ : state) {
    benchmark::DoNotOptimize(isee(ds, groups[0], groups[1]));
  }
}
BENCHMARK(BM_Isee)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
