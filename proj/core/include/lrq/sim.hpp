#pragma once

#include "lrq/mdp.hpp"
#include "lrq/solver.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lrq {

struct SimConfig {
  Problem problem = Problem::MountainCar;
  int episodes = 10000;
  int max_steps = 1000;
  std::uint64_t seed = 0;
};

/// episodes = 10000 with the per-problem step budget: 1000 for mountain car,
/// 100 for the pendulum.
SimConfig default_sim_config(Problem p);

using PolicyFn = std::function<int(ContinuousState)>;

struct SimResult {
  double mean = 0.0;  // mean of per_episode
  std::vector<double> per_episode;
};

/// Episode starts drawn uniformly over the grid box from one seeded stream,
/// in episode order, so two runs with the same seed share their starts.
std::vector<ContinuousState> draw_initial_states(const Grid2D& grid, int episodes,
                                                 std::uint64_t seed);

/// Steps each episode under the policy until the goal or the step budget;
/// the per-episode value is the step count (censored episodes count the full
/// budget, a start at the goal counts zero).
SimResult simulate_mountain_car(const PolicyFn& policy, const Grid2D& grid,
                                const SimConfig& config);
SimResult simulate_mountain_car(const PolicyFn& policy, const Grid2D& grid,
                                std::span<const ContinuousState> starts, int max_steps);

/// Runs every episode for exactly max_steps steps; the per-episode value is
/// the mean absolute angle deviation from upright, measured after each step.
SimResult simulate_pendulum(const PolicyFn& policy, const Grid2D& grid,
                            const SimConfig& config);
SimResult simulate_pendulum(const PolicyFn& policy, const Grid2D& grid,
                            std::span<const ContinuousState> starts, int max_steps);

struct PolicyRow {
  std::string policy;  // "optimal" or "compressed"
  double metric = 0.0;
  std::int64_t rank = 0;
  double nnz_fraction = 0.0;
  std::int64_t storage_entries = 0;
  double agreement = 1.0;  // value-level match with the optimal tabular policy
};

struct BenchReport {
  std::string problem;
  std::string metric_name;  // "time_to_goal" or "deviation"
  std::vector<PolicyRow> rows;
};

/// Pairs the dense and compressed models into one report: the optimal row
/// stores the full table (rank = n_actions, storage = m * n), the compressed
/// row the factor rank, sparse fill, factor-plus-sparse storage, and the
/// tabular policy agreement.
BenchReport bench_report(Problem problem, const Matrix& q, const CompressedQ& cq,
                         const SimResult& optimal, const SimResult& compressed);

}  // namespace lrq
