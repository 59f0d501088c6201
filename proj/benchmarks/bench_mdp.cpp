#include "lrq/mdp.hpp"
#include "lrq/rpca.hpp"
#include "lrq/sim.hpp"
#include "lrq/solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace lrq;

namespace {

void bm_interpolate(benchmark::State& state) {
  const Grid2D g = default_grid(Problem::MountainCar);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(g.dim1.lo, g.dim1.hi);
  std::uniform_real_distribution<double> v(g.dim2.lo, g.dim2.hi);
  for (auto _ : state)
    benchmark::DoNotOptimize(interpolate(g, {x(rng), v(rng)}));
}
BENCHMARK(bm_interpolate);

void bm_build_tabular(benchmark::State& state) {
  const Grid2D g = default_grid(Problem::MountainCar);
  for (auto _ : state) benchmark::DoNotOptimize(build_tabular(Problem::MountainCar, g));
}
BENCHMARK(bm_build_tabular)->Unit(benchmark::kMillisecond);

void bm_bellman_sweep(benchmark::State& state) {
  const Grid2D g = default_grid(Problem::MountainCar);
  const TabularMdp mdp = build_tabular(Problem::MountainCar, g);
  Matrix q = Matrix::Zero(g.n_states(), g.n_actions());
  for (auto _ : state) {
    q = bellman_sweep(mdp, q, 1.0);
    benchmark::DoNotOptimize(q.data());
  }
  state.SetItemsProcessed(state.iterations() * g.n_states() * g.n_actions());
}
BENCHMARK(bm_bellman_sweep)->Unit(benchmark::kMillisecond);

struct PolicyFixture {
  Grid2D grid = default_grid(Problem::MountainCar);
  Matrix q;
  CompressedQ model;

  PolicyFixture() {
    // a light stand-in for the solved table: smooth rank structure plus spikes
    const RecoveryInstance inst =
        synth_recovery_instance(grid.n_states(), grid.n_actions(), 12, 0.01, 3.0, 6);
    q = inst.m;
    PcpConfig cfg;
    cfg.lambda = default_lambda(q.rows(), q.cols());
    model = compress(q, cfg).model;
  }
};

const PolicyFixture& fixture() {
  static const PolicyFixture f;
  return f;
}

void bm_lookup_row_dense(benchmark::State& state) {
  const auto& f = fixture();
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Eigen::RowVectorXd(f.q.row(i)));
    i = (i + 37) % f.q.rows();
  }
}
BENCHMARK(bm_lookup_row_dense);

void bm_lookup_row_compressed(benchmark::State& state) {
  const auto& f = fixture();
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lookup_row(f.model, i));
    i = (i + 37) % f.q.rows();
  }
}
BENCHMARK(bm_lookup_row_compressed);

void bm_continuous_policy_dense(benchmark::State& state) {
  const auto& f = fixture();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(f.grid.dim1.lo, f.grid.dim1.hi);
  std::uniform_real_distribution<double> v(f.grid.dim2.lo, f.grid.dim2.hi);
  for (auto _ : state)
    benchmark::DoNotOptimize(continuous_policy(f.q, f.grid, {x(rng), v(rng)}));
}
BENCHMARK(bm_continuous_policy_dense);

void bm_continuous_policy_compressed(benchmark::State& state) {
  const auto& f = fixture();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(f.grid.dim1.lo, f.grid.dim1.hi);
  std::uniform_real_distribution<double> v(f.grid.dim2.lo, f.grid.dim2.hi);
  for (auto _ : state)
    benchmark::DoNotOptimize(continuous_policy(f.model, f.grid, {x(rng), v(rng)}));
}
BENCHMARK(bm_continuous_policy_compressed);

}  // namespace
