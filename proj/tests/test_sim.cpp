#include "lrq/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace lrq;

namespace {

constexpr double kPi = std::numbers::pi;

Grid2D small_mc_grid() {
  return {{-1.2, 0.6, 20}, {-0.07, 0.07, 15}, {-1.0, 1.0, 11}, false};
}

// 5 actions put an exact zero torque at index 2
Grid2D small_pendulum_grid() {
  return {{-kPi, kPi, 12}, {-10.0, 10.0, 9}, {-1.0, 1.0, 5}, true};
}

}  // namespace

TEST_CASE("default sim configs carry the per-problem step budgets") {
  const SimConfig mc = default_sim_config(Problem::MountainCar);
  CHECK(mc.episodes == 10000);
  CHECK(mc.max_steps == 1000);
  const SimConfig pend = default_sim_config(Problem::Pendulum);
  CHECK(pend.max_steps == 100);
  CHECK(pend.episodes == 10000);
}

TEST_CASE("draw_initial_states is seeded, ordered, and in the box") {
  const Grid2D g = small_mc_grid();
  const auto a = draw_initial_states(g, 500, 42);
  const auto b = draw_initial_states(g, 500, 42);
  REQUIRE(a.size() == 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pos == b[i].pos);
    CHECK(a[i].vel == b[i].vel);
    CHECK(a[i].pos >= g.dim1.lo);
    CHECK(a[i].pos <= g.dim1.hi);
    CHECK(a[i].vel >= g.dim2.lo);
    CHECK(a[i].vel <= g.dim2.hi);
  }

  // a longer draw extends the same stream
  const auto longer = draw_initial_states(g, 600, 42);
  CHECK(longer[99].pos == a[99].pos);

  const auto other = draw_initial_states(g, 500, 43);
  CHECK(other[0].pos != a[0].pos);
  CHECK_THROWS_AS(draw_initial_states(g, 0, 1), std::invalid_argument);
}

TEST_CASE("mountain car episodes stop at the goal") {
  const Grid2D g = small_mc_grid();
  const PolicyFn full_right = [](ContinuousState) { return 10; };  // action value 1

  // near the hilltop with momentum: one push is enough
  const std::vector<ContinuousState> near{{0.49, 0.05}};
  const SimResult r = simulate_mountain_car(full_right, g, near, 100);
  REQUIRE(r.per_episode.size() == 1);
  CHECK(r.per_episode[0] <= 2.0);
  CHECK(r.per_episode[0] >= 1.0);
  CHECK(r.mean == r.per_episode[0]);

  // starting on the goal costs zero steps
  const std::vector<ContinuousState> done{{0.55, 0.0}};
  CHECK(simulate_mountain_car(full_right, g, done, 100).per_episode[0] == 0.0);
}

TEST_CASE("mountain car episodes censor at the step budget") {
  const Grid2D g = small_mc_grid();
  const PolicyFn full_left = [](ContinuousState) { return 0; };  // action value -1
  const std::vector<ContinuousState> starts{{-1.0, 0.0}, {-0.5, -0.05}};
  const SimResult r = simulate_mountain_car(full_left, g, starts, 5);
  CHECK(r.per_episode == std::vector<double>{5.0, 5.0});
  CHECK(r.mean == 5.0);
}

TEST_CASE("mountain car simulation is reproducible per seed") {
  const Grid2D g = small_mc_grid();
  const PolicyFn bang = [](ContinuousState s) { return s.vel >= 0.0 ? 10 : 0; };
  SimConfig cfg = default_sim_config(Problem::MountainCar);
  cfg.episodes = 300;
  cfg.max_steps = 200;
  cfg.seed = 7;
  const SimResult r1 = simulate_mountain_car(bang, g, cfg);
  const SimResult r2 = simulate_mountain_car(bang, g, cfg);
  CHECK(r1.mean == r2.mean);
  CHECK(r1.per_episode == r2.per_episode);

  // the bang-bang heuristic solves the coarse problem well within budget
  CHECK(r1.mean > 0.0);
  CHECK(r1.mean < 200.0);

  double sum = 0.0;
  for (const double x : r1.per_episode) sum += x;
  CHECK(std::abs(r1.mean - sum / 300.0) <= 1e-12);
}

TEST_CASE("simulate validates its config") {
  const Grid2D g = small_mc_grid();
  const PolicyFn any = [](ContinuousState) { return 0; };
  SimConfig cfg = default_sim_config(Problem::Pendulum);
  CHECK_THROWS_AS(simulate_mountain_car(any, g, cfg), std::invalid_argument);
  cfg = default_sim_config(Problem::MountainCar);
  cfg.episodes = 0;
  CHECK_THROWS_AS(simulate_mountain_car(any, g, cfg), std::invalid_argument);
  cfg = default_sim_config(Problem::MountainCar);
  cfg.max_steps = 0;
  CHECK_THROWS_AS(simulate_mountain_car(any, g, cfg), std::invalid_argument);
}

TEST_CASE("pendulum equilibrium under zero torque has zero deviation") {
  const Grid2D g = small_pendulum_grid();
  REQUIRE(g.actions.node(2) == 0.0);
  const PolicyFn zero_torque = [](ContinuousState) { return 2; };
  const std::vector<ContinuousState> upright{{0.0, 0.0}};
  const SimResult r = simulate_pendulum(zero_torque, g, upright, 50);
  CHECK(r.per_episode[0] == 0.0);
  CHECK(r.mean == 0.0);
}

TEST_CASE("pendulum deviation is measured after each step") {
  const Grid2D g = small_pendulum_grid();
  const PolicyFn zero_torque = [](ContinuousState) { return 2; };

  // from (0, 1): theta_1 = 0.3, so one step averages |0.3|
  const std::vector<ContinuousState> spin{{0.0, 1.0}};
  const SimResult one = simulate_pendulum(zero_torque, g, spin, 1);
  CHECK(one.per_episode[0] == 0.3);

  // second step: speed_1 = 0.7, theta_2 = 0.3 + 0.21 = 0.51
  const SimResult two = simulate_pendulum(zero_torque, g, spin, 2);
  CHECK(two.per_episode[0] == doctest::Approx(0.5 * (0.3 + 0.51)).epsilon(1e-12));
}

TEST_CASE("pendulum deviations are bounded by pi and reproducible") {
  const Grid2D g = small_pendulum_grid();
  const PolicyFn wiggle = [](ContinuousState s) { return s.pos > 0.0 ? 0 : 4; };
  SimConfig cfg = default_sim_config(Problem::Pendulum);
  cfg.episodes = 200;
  cfg.max_steps = 60;
  cfg.seed = 11;
  const SimResult r1 = simulate_pendulum(wiggle, g, cfg);
  const SimResult r2 = simulate_pendulum(wiggle, g, cfg);
  CHECK(r1.per_episode == r2.per_episode);
  REQUIRE(r1.per_episode.size() == 200);
  for (const double d : r1.per_episode) {
    CHECK(d >= 0.0);
    CHECK(d <= kPi);
  }
  CHECK(r1.mean > 0.0);
}

TEST_CASE("bench_report pairs the optimal and compressed rows") {
  const Grid2D g{{-1.2, 0.6, 10}, {-0.07, 0.07, 8}, {-1.0, 1.0, 9}, false};
  const TabularMdp mdp = build_tabular(Problem::MountainCar, g);
  ViConfig vi;
  const Matrix q = value_iteration(mdp, vi).q;

  PcpConfig pcp;
  pcp.lambda = default_lambda(q.rows(), q.cols());
  const QCompression c = compress(q, pcp);

  SimConfig cfg = default_sim_config(Problem::MountainCar);
  cfg.episodes = 100;
  cfg.max_steps = 300;
  const SimResult opt = simulate_mountain_car(
      [&](ContinuousState s) { return continuous_policy(q, g, s); }, g, cfg);
  const SimResult comp = simulate_mountain_car(
      [&](ContinuousState s) { return continuous_policy(c.model, g, s); }, g, cfg);

  const BenchReport rep = bench_report(Problem::MountainCar, q, c.model, opt, comp);
  CHECK(rep.problem == "mountain-car");
  CHECK(rep.metric_name == "time_to_goal");
  REQUIRE(rep.rows.size() == 2);

  const PolicyRow& o = rep.rows[0];
  CHECK(o.policy == "optimal");
  CHECK(o.metric == opt.mean);
  CHECK(o.rank == q.cols());
  CHECK(o.nnz_fraction == 0.0);
  CHECK(o.storage_entries == q.rows() * q.cols());
  CHECK(o.agreement == 1.0);

  const PolicyRow& cr = rep.rows[1];
  CHECK(cr.policy == "compressed");
  CHECK(cr.metric == comp.mean);
  CHECK(cr.rank == c.model.factors.rank());
  CHECK(cr.nnz_fraction ==
        static_cast<double>(c.model.s.nnz()) / static_cast<double>(q.rows() * q.cols()));
  CHECK(cr.storage_entries == c.model.storage_entries());
  CHECK(cr.agreement >= 0.0);
  CHECK(cr.agreement <= 1.0);

  // mismatched shapes are rejected
  const RecoveryInstance other = synth_recovery_instance(10, 9, 2, 0.05, 5.0, 3);
  PcpConfig pcp2;
  pcp2.lambda = default_lambda(10, 9);
  const QCompression c2 = compress(other.m, pcp2);
  CHECK_THROWS_AS(bench_report(Problem::MountainCar, q, c2.model, opt, comp),
                  std::invalid_argument);
}
