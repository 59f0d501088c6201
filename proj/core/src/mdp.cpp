#include "lrq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lrq {

namespace {

constexpr double kGoalX = 0.5;
constexpr double kAccelGain = 0.001;
constexpr double kGravity = 0.0025;
constexpr double kPendulumDt = 0.3;

struct AxisPos {
  int lo;    // lower cell node, in [0, count - 2]
  double t;  // fraction toward the upper node, in [0, 1]
};

AxisPos locate(const GridAxis& ax, double x, bool wrap) {
  if (wrap) x = wrap_angle(x);
  x = std::clamp(x, ax.lo, ax.hi);
  const double f = (x - ax.lo) / ax.spacing();

  // exact-node fast path keeps on-node queries on a single corner
  const int nearest = static_cast<int>(std::lround(f));
  if (nearest >= 0 && nearest < ax.count && x == ax.node(nearest)) {
    if (nearest == ax.count - 1) return {ax.count - 2, 1.0};
    return {nearest, 0.0};
  }

  int lo = static_cast<int>(std::floor(f));
  lo = std::clamp(lo, 0, ax.count - 2);
  const double t = std::clamp(f - static_cast<double>(lo), 0.0, 1.0);
  return {lo, t};
}

}  // namespace

double GridAxis::node(int i) const {
  if (count == 1) return lo;
  return lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(count - 1);
}

void Grid2D::validate() const {
  if (dim1.count < 2 || dim2.count < 2)
    throw std::invalid_argument("Grid2D: state axes need at least two nodes");
  if (actions.count < 1) throw std::invalid_argument("Grid2D: need at least one action");
  if (!(dim1.lo < dim1.hi) || !(dim2.lo < dim2.hi) ||
      (actions.count > 1 && !(actions.lo < actions.hi)))
    throw std::invalid_argument("Grid2D: every axis needs lo < hi");
}

Problem problem_from_name(std::string_view name) {
  if (name == "mountain-car") return Problem::MountainCar;
  if (name == "pendulum") return Problem::Pendulum;
  throw std::invalid_argument("unknown problem '" + std::string(name) +
                              "' (expected mountain-car or pendulum)");
}

std::string_view problem_name(Problem p) {
  return p == Problem::MountainCar ? "mountain-car" : "pendulum";
}

Grid2D default_grid(Problem p) {
  constexpr double pi = std::numbers::pi;
  if (p == Problem::MountainCar)
    return {{-1.2, 0.6, 50}, {-0.07, 0.07, 50}, {-1.0, 1.0, 1000}, false};
  return {{-pi, pi, 50}, {-10.0, 10.0, 50}, {-1.0, 1.0, 1000}, true};
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;  // identity on the canonical range
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w <= 0.0) w += 2.0 * pi;
  return w - pi;
}

ContinuousState mountain_car_step(ContinuousState s, double accel, const Grid2D& grid) {
  double vel = s.vel + kAccelGain * accel - kGravity * std::cos(3.0 * s.pos);
  double pos = s.pos + vel;  // position advances by the updated velocity
  vel = std::clamp(vel, grid.dim2.lo, grid.dim2.hi);
  if (pos < grid.dim1.lo) {
    pos = grid.dim1.lo;
    vel = 0.0;  // inelastic wall at the left bound
  } else if (pos > grid.dim1.hi) {
    pos = grid.dim1.hi;
  }
  return {pos, vel};
}

ContinuousState pendulum_step(ContinuousState s, double torque, const Grid2D& grid) {
  // both right-hand sides read the pre-step state
  const double pos = s.pos + s.vel * kPendulumDt;
  const double vel = s.vel + (std::sin(s.pos) - s.vel + torque) * kPendulumDt;
  return {wrap_angle(pos), std::clamp(vel, grid.dim2.lo, grid.dim2.hi)};
}

double mountain_car_reward(double x) { return x >= kGoalX ? 10.0 : -1.0; }

double pendulum_reward(double theta, double torque) {
  return std::exp(std::cos(theta) - 1.0) - 0.1 * torque * torque;
}

bool mountain_car_goal(double x) { return x >= kGoalX; }

ContinuousState step(Problem p, ContinuousState s, double action, const Grid2D& grid) {
  return p == Problem::MountainCar ? mountain_car_step(s, action, grid)
                                   : pendulum_step(s, action, grid);
}

double reward(Problem p, ContinuousState s, double action) {
  return p == Problem::MountainCar ? mountain_car_reward(s.pos)
                                   : pendulum_reward(s.pos, action);
}

CellWeights interpolate(const Grid2D& grid, ContinuousState s) {
  const AxisPos p1 = locate(grid.dim1, s.pos, grid.wrap_dim1);
  const AxisPos p2 = locate(grid.dim2, s.vel, false);
  const double w1[2] = {1.0 - p1.t, p1.t};
  const double w2[2] = {1.0 - p2.t, p2.t};

  CellWeights out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double w = w1[a] * w2[b];
      if (w == 0.0) continue;
      out.state[out.count] = grid.state_index(p1.lo + a, p2.lo + b);
      out.weight[out.count] = w;
      ++out.count;
    }
  return out;
}

TabularMdp::TabularMdp(int n_states, int n_actions)
    : rewards(Matrix::Zero(n_states, n_actions)),
      n_states_(n_states),
      n_actions_(n_actions),
      counts_(static_cast<std::size_t>(n_states) * n_actions, 0),
      succ_(counts_.size() * kMaxSuccessors, 0),
      prob_(counts_.size() * kMaxSuccessors, 0.0) {
  if (n_states < 1 || n_actions < 1)
    throw std::invalid_argument("TabularMdp: counts must be positive");
}

void TabularMdp::set_row(int s, int a, const CellWeights& w) {
  const std::size_t f = flat(s, a);
  counts_[f] = static_cast<std::uint8_t>(w.count);
  for (int k = 0; k < w.count; ++k) {
    succ_[f * kMaxSuccessors + k] = w.state[k];
    prob_[f * kMaxSuccessors + k] = w.weight[k];
  }
}

TabularMdp build_tabular(Problem p, const Grid2D& grid) {
  grid.validate();
  TabularMdp mdp(grid.n_states(), grid.n_actions());
  for (int i1 = 0; i1 < grid.dim1.count; ++i1) {
    for (int i2 = 0; i2 < grid.dim2.count; ++i2) {
      const int s = grid.state_index(i1, i2);
      const ContinuousState sc{grid.dim1.node(i1), grid.dim2.node(i2)};
      const bool absorbing = p == Problem::MountainCar && mountain_car_goal(sc.pos);
      for (int a = 0; a < grid.n_actions(); ++a) {
        if (absorbing) {
          // episode is over: self-loop, no further reward
          CellWeights self;
          self.state[0] = s;
          self.weight[0] = 1.0;
          self.count = 1;
          mdp.set_row(s, a, self);
        } else {
          const double av = grid.actions.node(a);
          mdp.set_row(s, a, interpolate(grid, step(p, sc, av, grid)));
          mdp.rewards(s, a) = reward(p, sc, av);
        }
      }
    }
  }
  return mdp;
}

}  // namespace lrq
