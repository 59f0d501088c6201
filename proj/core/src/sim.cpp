#include "lrq/sim.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lrq {

namespace {

void check_sim_config(const SimConfig& cfg, Problem expected) {
  if (cfg.problem != expected)
    throw std::invalid_argument("simulate: config is for a different problem");
  if (cfg.episodes < 1) throw std::invalid_argument("simulate: episodes must be positive");
  if (cfg.max_steps < 1) throw std::invalid_argument("simulate: max_steps must be positive");
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

SimConfig default_sim_config(Problem p) {
  SimConfig cfg;
  cfg.problem = p;
  cfg.episodes = 10000;
  cfg.max_steps = p == Problem::MountainCar ? 1000 : 100;
  cfg.seed = 0;
  return cfg;
}

std::vector<ContinuousState> draw_initial_states(const Grid2D& grid, int episodes,
                                                 std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("draw_initial_states: episodes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d1(grid.dim1.lo, grid.dim1.hi);
  std::uniform_real_distribution<double> d2(grid.dim2.lo, grid.dim2.hi);
  std::vector<ContinuousState> out;
  out.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    const double a = d1(rng);
    const double b = d2(rng);
    out.push_back({a, b});
  }
  return out;
}

SimResult simulate_mountain_car(const PolicyFn& policy, const Grid2D& grid,
                                std::span<const ContinuousState> starts, int max_steps) {
  if (max_steps < 1) throw std::invalid_argument("simulate: max_steps must be positive");
  SimResult res;
  res.per_episode.reserve(starts.size());
  for (const ContinuousState& start : starts) {
    ContinuousState s = start;
    int steps = 0;
    while (steps < max_steps && !mountain_car_goal(s.pos)) {
      s = mountain_car_step(s, grid.actions.node(policy(s)), grid);
      ++steps;
    }
    res.per_episode.push_back(static_cast<double>(steps));
  }
  res.mean = mean_of(res.per_episode);
  return res;
}

SimResult simulate_mountain_car(const PolicyFn& policy, const Grid2D& grid,
                                const SimConfig& config) {
  check_sim_config(config, Problem::MountainCar);
  const auto starts = draw_initial_states(grid, config.episodes, config.seed);
  return simulate_mountain_car(policy, grid, starts, config.max_steps);
}

SimResult simulate_pendulum(const PolicyFn& policy, const Grid2D& grid,
                            std::span<const ContinuousState> starts, int max_steps) {
  if (max_steps < 1) throw std::invalid_argument("simulate: max_steps must be positive");
  SimResult res;
  res.per_episode.reserve(starts.size());
  for (const ContinuousState& start : starts) {
    ContinuousState s = start;
    double dev_sum = 0.0;
    for (int t = 0; t < max_steps; ++t) {
      s = pendulum_step(s, grid.actions.node(policy(s)), grid);
      dev_sum += std::abs(wrap_angle(s.pos));
    }
    res.per_episode.push_back(dev_sum / static_cast<double>(max_steps));
  }
  res.mean = mean_of(res.per_episode);
  return res;
}

SimResult simulate_pendulum(const PolicyFn& policy, const Grid2D& grid,
                            const SimConfig& config) {
  check_sim_config(config, Problem::Pendulum);
  const auto starts = draw_initial_states(grid, config.episodes, config.seed);
  return simulate_pendulum(policy, grid, starts, config.max_steps);
}

BenchReport bench_report(Problem problem, const Matrix& q, const CompressedQ& cq,
                         const SimResult& optimal, const SimResult& compressed) {
  if (cq.rows() != q.rows() || cq.cols() != q.cols())
    throw std::invalid_argument("bench_report: model dimensions disagree");
  const std::int64_t m = q.rows();
  const std::int64_t n = q.cols();

  const double agreement =
      policy_value_agreement(q, extract_policy(q), extract_policy(cq));

  BenchReport rep;
  rep.problem = std::string(problem_name(problem));
  rep.metric_name = problem == Problem::MountainCar ? "time_to_goal" : "deviation";
  rep.rows.push_back({"optimal", optimal.mean, n, 0.0, m * n, 1.0});
  rep.rows.push_back({"compressed", compressed.mean, cq.factors.rank(),
                      static_cast<double>(cq.s.nnz()) / static_cast<double>(m * n),
                      cq.storage_entries(), agreement});
  return rep;
}

}  // namespace lrq
