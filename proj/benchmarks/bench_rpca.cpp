#include "lrq/rpca.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lrq;

namespace {

Matrix random_matrix(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix x(m, n);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  return x;
}

void bm_shrink(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix x = random_matrix(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(shrink(x, 0.5));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(bm_shrink)->Arg(100)->Arg(500)->Arg(1000);

void bm_svt(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix x = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(svt(x, 1.0));
}
BENCHMARK(bm_svt)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_svt_tall(benchmark::State& state) {
  const Matrix x = random_matrix(2500, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(svt(x, 1.0));
}
BENCHMARK(bm_svt_tall)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void bm_pcp(benchmark::State& state) {
  const Index n = state.range(0);
  const RecoveryInstance inst = synth_recovery_instance(n, n, n / 20, 0.05, 5.0, 4);
  PcpConfig cfg;
  cfg.lambda = default_lambda(n, n);
  for (auto _ : state) {
    const PcpResult r = pcp_alm(inst.m, cfg);
    benchmark::DoNotOptimize(r.final_residual);
  }
}
BENCHMARK(bm_pcp)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_synth_instance(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(synth_recovery_instance(200, 200, 10, 0.05, 5.0, 5));
}
BENCHMARK(bm_synth_instance)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
