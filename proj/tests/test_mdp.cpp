#include "lrq/mdp.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lrq;

namespace {

constexpr double kPi = std::numbers::pi;

Grid2D small_mc_grid() {
  // coarse mountain-car grid for exhaustive checks
  return {{-1.2, 0.6, 20}, {-0.07, 0.07, 15}, {-1.0, 1.0, 11}, false};
}

Grid2D small_pendulum_grid() {
  return {{-kPi, kPi, 12}, {-10.0, 10.0, 9}, {-1.0, 1.0, 7}, true};
}

}  // namespace

TEST_CASE("grid nodes span the axis uniformly") {
  const GridAxis ax{-1.2, 0.6, 50};
  CHECK(ax.node(0) == -1.2);
  CHECK(ax.node(49) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(ax.node(1) - ax.node(0) == doctest::Approx(1.8 / 49).epsilon(1e-12));

  const GridAxis single{-1.0, 1.0, 1};
  CHECK(single.node(0) == -1.0);  // defined as lo for a one-node axis
}

TEST_CASE("grid state indexing is row-major in dim1") {
  const Grid2D g = small_mc_grid();
  CHECK(g.n_states() == 300);
  CHECK(g.state_index(0, 0) == 0);
  CHECK(g.state_index(0, 14) == 14);
  CHECK(g.state_index(1, 0) == 15);
  CHECK(g.state_coords(17) == std::pair<int, int>{1, 2});
}

TEST_CASE("grid validation rejects degenerate axes") {
  Grid2D g = small_mc_grid();
  g.dim1.count = 1;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = small_mc_grid();
  g.actions.count = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = small_mc_grid();
  g.dim2.lo = g.dim2.hi;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK_NOTHROW(small_mc_grid().validate());
  CHECK_NOTHROW(small_pendulum_grid().validate());
}

TEST_CASE("problem names round-trip") {
  CHECK(problem_from_name("mountain-car") == Problem::MountainCar);
  CHECK(problem_from_name("pendulum") == Problem::Pendulum);
  CHECK_THROWS_AS(problem_from_name("cartpole"), std::invalid_argument);
  CHECK(problem_name(Problem::MountainCar) == "mountain-car");
  CHECK(problem_name(Problem::Pendulum) == "pendulum");
}

TEST_CASE("default grids have the benchmark shape") {
  const Grid2D mc = default_grid(Problem::MountainCar);
  CHECK(mc.n_states() == 2500);
  CHECK(mc.n_actions() == 1000);
  CHECK(mc.dim1.lo == -1.2);
  CHECK(mc.dim1.hi == 0.6);
  CHECK(mc.dim2.lo == -0.07);
  CHECK(mc.dim2.hi == 0.07);
  CHECK(!mc.wrap_dim1);

  const Grid2D pend = default_grid(Problem::Pendulum);
  CHECK(pend.n_states() == 2500);
  CHECK(pend.n_actions() == 1000);
  CHECK(pend.dim1.lo == -kPi);
  CHECK(pend.dim1.hi == kPi);
  CHECK(pend.dim2.lo == -10.0);
  CHECK(pend.dim2.hi == 10.0);
  CHECK(pend.wrap_dim1);
  CHECK(pend.actions.lo == -1.0);
  CHECK(pend.actions.hi == 1.0);
}

TEST_CASE("wrap_angle lands in the half-open interval") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi).epsilon(1e-15));  // -pi maps to pi
  CHECK(wrap_angle(kPi + 0.1) == doctest::Approx(-kPi + 0.1).epsilon(1e-12));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(wrap_angle(0.0) == 0.0);
  for (double a = -20.0; a <= 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    // same point on the circle
    CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) <= 1e-9);
  }
}

TEST_CASE("mountain car step follows the hill dynamics") {
  const Grid2D g = default_grid(Problem::MountainCar);

  // from rest at the origin: velocity picks up 0.001*a - 0.0025*cos(0)
  const ContinuousState push = mountain_car_step({0.0, 0.0}, 1.0, g);
  CHECK(push.vel == doctest::Approx(-0.0015).epsilon(1e-12));
  CHECK(push.pos == doctest::Approx(-0.0015).epsilon(1e-12));  // moves by the new velocity

  const ContinuousState coast = mountain_car_step({0.0, 0.0}, 0.0, g);
  CHECK(coast.vel == doctest::Approx(-0.0025).epsilon(1e-12));

  // the valley floor is around x = -pi/6 where cos(3x) = 0 kills gravity
  const ContinuousState floor = mountain_car_step({-kPi / 6.0, 0.01}, 0.0, g);
  CHECK(floor.vel == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("mountain car step clips to the grid box") {
  const Grid2D g = default_grid(Problem::MountainCar);

  // left wall zeroes the velocity
  const ContinuousState wall = mountain_car_step({-1.199, -0.07}, -1.0, g);
  CHECK(wall.pos == -1.2);
  CHECK(wall.vel == 0.0);

  // right edge clips position only
  const ContinuousState edge = mountain_car_step({0.59, 0.07}, 1.0, g);
  CHECK(edge.pos == 0.6);
  CHECK(edge.vel > 0.0);

  // velocity clips to its bound
  ContinuousState s{-0.5, 0.0695};
  s = mountain_car_step(s, 1.0, g);
  CHECK(s.vel <= 0.07);
}

TEST_CASE("mountain car reward and goal share the threshold") {
  CHECK(mountain_car_reward(0.5) == 10.0);  // boundary is inclusive
  CHECK(mountain_car_reward(0.6) == 10.0);
  CHECK(mountain_car_reward(0.49) == -1.0);
  CHECK(mountain_car_reward(-1.2) == -1.0);
  CHECK(mountain_car_goal(0.5));
  CHECK(mountain_car_goal(0.51));
  CHECK(!mountain_car_goal(0.499));
}

TEST_CASE("pendulum step reads both derivatives from the old state") {
  const Grid2D g = default_grid(Problem::Pendulum);

  // upright equilibrium is a fixed point
  const ContinuousState still = pendulum_step({0.0, 0.0}, 0.0, g);
  CHECK(still.pos == 0.0);
  CHECK(still.vel == 0.0);

  // theta' = 0 + 1*0.3, speed' = 1 + (sin 0 - 1 + 0)*0.3
  const ContinuousState spin = pendulum_step({0.0, 1.0}, 0.0, g);
  CHECK(spin.pos == 0.3);
  CHECK(spin.vel == 0.7);

  // angle wraps across the seam
  const ContinuousState seam = pendulum_step({kPi - 0.01, 1.0}, 0.0, g);
  CHECK(seam.pos == doctest::Approx(-kPi + 0.29).epsilon(1e-12));
  CHECK(seam.pos > -kPi);
  CHECK(seam.pos <= kPi);

  // speed clips to the grid bound
  const ContinuousState fast = pendulum_step({kPi / 2.0, 9.99}, 1.0, g);
  CHECK(fast.vel <= 10.0);
}

TEST_CASE("pendulum reward peaks upright and pays for torque") {
  CHECK(pendulum_reward(0.0, 0.0) == 1.0);             // exp(0) - 0
  CHECK(pendulum_reward(0.0, 1.0) == 0.9);             // 1 - 0.1
  CHECK(pendulum_reward(kPi, 0.0) == std::exp(-2.0));  // hanging straight down
  CHECK(pendulum_reward(0.3, 0.2) < pendulum_reward(0.3, 0.0));
}

TEST_CASE("interpolate returns one corner on a node") {
  const Grid2D g = small_mc_grid();
  for (int i1 : {0, 3, 19})
    for (int i2 : {0, 7, 14}) {
      const CellWeights w = interpolate(g, {g.dim1.node(i1), g.dim2.node(i2)});
      REQUIRE(w.count == 1);
      CHECK(w.state[0] == g.state_index(i1, i2));
      CHECK(w.weight[0] == 1.0);
    }
}

TEST_CASE("interpolate splits a cell center four ways") {
  const Grid2D g = small_mc_grid();
  const double x = 0.5 * (g.dim1.node(4) + g.dim1.node(5));
  const double y = 0.5 * (g.dim2.node(9) + g.dim2.node(10));
  const CellWeights w = interpolate(g, {x, y});
  REQUIRE(w.count == 4);
  double sum = 0.0;
  for (int k = 0; k < w.count; ++k) {
    CHECK(w.weight[k] == doctest::Approx(0.25).epsilon(1e-9));
    sum += w.weight[k];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolate drops zero-weight corners on an edge midpoint") {
  const Grid2D g = small_mc_grid();
  const double x = g.dim1.node(2);  // exactly on a dim1 node
  const double y = 0.5 * (g.dim2.node(5) + g.dim2.node(6));
  const CellWeights w = interpolate(g, {x, y});
  REQUIRE(w.count == 2);
  CHECK(w.weight[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w.weight[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w.state[0] == g.state_index(2, 5));
  CHECK(w.state[1] == g.state_index(2, 6));
}

TEST_CASE("interpolate weights form a local partition of unity") {
  const Grid2D g = small_mc_grid();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dx(g.dim1.lo, g.dim1.hi);
  std::uniform_real_distribution<double> dy(g.dim2.lo, g.dim2.hi);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = dx(rng);
    const double y = dy(rng);
    const CellWeights w = interpolate(g, {x, y});
    REQUIRE(w.count >= 1);
    REQUIRE(w.count <= 4);
    double sum = 0.0;
    for (int k = 0; k < w.count; ++k) {
      CHECK(w.weight[k] > 0.0);
      sum += w.weight[k];

      // corners belong to the enclosing cell
      const auto [i1, i2] = g.state_coords(w.state[k]);
      CHECK(std::abs(g.dim1.node(i1) - x) <= g.dim1.spacing() + 1e-12);
      CHECK(std::abs(g.dim2.node(i2) - y) <= g.dim2.spacing() + 1e-12);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("interpolate clamps out-of-range queries to the boundary") {
  const Grid2D g = small_mc_grid();
  const CellWeights low = interpolate(g, {-5.0, -1.0});
  REQUIRE(low.count == 1);
  CHECK(low.state[0] == g.state_index(0, 0));
  const CellWeights high = interpolate(g, {5.0, 1.0});
  REQUIRE(high.count == 1);
  CHECK(high.state[0] == g.state_index(19, 14));
}

TEST_CASE("interpolate wraps the angular dimension") {
  const Grid2D g = small_pendulum_grid();
  // just past pi wraps to just past -pi, i.e. into the first dim1 cell
  const CellWeights w = interpolate(g, {kPi + 0.01, 0.0});
  REQUIRE(w.count >= 1);
  for (int k = 0; k < w.count; ++k) {
    const auto [i1, i2] = g.state_coords(w.state[k]);
    CHECK(i1 <= 1);  // first cell, not the last
  }
}

TEST_CASE("build_tabular yields stochastic local transition rows") {
  for (const Problem p : {Problem::MountainCar, Problem::Pendulum}) {
    const Grid2D g = p == Problem::MountainCar ? small_mc_grid() : small_pendulum_grid();
    const TabularMdp mdp = build_tabular(p, g);
    REQUIRE(mdp.n_states() == g.n_states());
    REQUIRE(mdp.n_actions() == g.n_actions());
    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < mdp.n_actions(); ++a) {
        const auto succ = mdp.successors(s, a);
        const auto prob = mdp.probabilities(s, a);
        REQUIRE(succ.size() == prob.size());
        REQUIRE(succ.size() >= 1);
        REQUIRE(succ.size() <= 4);
        double sum = 0.0;
        for (std::size_t k = 0; k < prob.size(); ++k) {
          CHECK(prob[k] > 0.0);
          CHECK(succ[k] >= 0);
          CHECK(succ[k] < mdp.n_states());
          sum += prob[k];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
  }
}

TEST_CASE("build_tabular makes goal states absorbing and rewardless") {
  const Grid2D g = small_mc_grid();
  const TabularMdp mdp = build_tabular(Problem::MountainCar, g);
  int n_goal = 0;
  for (int i1 = 0; i1 < g.dim1.count; ++i1) {
    const bool goal = mountain_car_goal(g.dim1.node(i1));
    for (int i2 = 0; i2 < g.dim2.count; ++i2) {
      const int s = g.state_index(i1, i2);
      if (goal) ++n_goal;
      for (int a = 0; a < g.n_actions(); ++a) {
        if (goal) {
          REQUIRE(mdp.n_successors(s, a) == 1);
          CHECK(mdp.successors(s, a)[0] == s);
          CHECK(mdp.probabilities(s, a)[0] == 1.0);
          CHECK(mdp.rewards(s, a) == 0.0);
        } else {
          CHECK(mdp.rewards(s, a) == -1.0);
        }
      }
    }
  }
  CHECK(n_goal > 0);
}

TEST_CASE("build_tabular pendulum rewards match the formula per state-action") {
  const Grid2D g = small_pendulum_grid();
  const TabularMdp mdp = build_tabular(Problem::Pendulum, g);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ds(0, g.n_states() - 1), da(0, g.n_actions() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const int s = ds(rng);
    const int a = da(rng);
    const auto [i1, i2] = g.state_coords(s);
    CHECK(mdp.rewards(s, a) == pendulum_reward(g.dim1.node(i1), g.actions.node(a)));
  }
}

TEST_CASE("build_tabular is reproducible") {
  const Grid2D g = small_pendulum_grid();
  const TabularMdp a = build_tabular(Problem::Pendulum, g);
  const TabularMdp b = build_tabular(Problem::Pendulum, g);
  CHECK(a.rewards == b.rewards);
  for (int s = 0; s < a.n_states(); ++s)
    for (int ac = 0; ac < a.n_actions(); ++ac) {
      REQUIRE(a.n_successors(s, ac) == b.n_successors(s, ac));
      for (int k = 0; k < a.n_successors(s, ac); ++k) {
        CHECK(a.successors(s, ac)[k] == b.successors(s, ac)[k]);
        CHECK(a.probabilities(s, ac)[k] == b.probabilities(s, ac)[k]);
      }
    }
}
