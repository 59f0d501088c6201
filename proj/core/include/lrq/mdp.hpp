#pragma once

#include "lrq/matrix.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace lrq {

/// Uniformly spaced nodes lo = node(0) <= ... <= node(count - 1) = hi.
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  double node(int i) const;
  double spacing() const { return (hi - lo) / static_cast<double>(count - 1); }
};

/// Two state dimensions plus a discretized scalar action set. States are
/// indexed row-major: state_index(i1, i2) = i1 * dim2.count + i2.
struct Grid2D {
  GridAxis dim1;
  GridAxis dim2;
  GridAxis actions;
  bool wrap_dim1 = false;  // dim1 is an angle, periodic with period 2*pi

  int n_states() const { return dim1.count * dim2.count; }
  int n_actions() const { return actions.count; }
  int state_index(int i1, int i2) const { return i1 * dim2.count + i2; }
  std::pair<int, int> state_coords(int s) const { return {s / dim2.count, s % dim2.count}; }

  /// Throws std::invalid_argument unless both state axes have at least two
  /// nodes, the action axis at least one, and every axis has lo < hi.
  void validate() const;
};

enum class Problem { MountainCar, Pendulum };

/// Accepts "mountain-car" and "pendulum"; throws std::invalid_argument.
Problem problem_from_name(std::string_view name);
std::string_view problem_name(Problem p);

/// Benchmark discretization: 50x50 states, 1000 actions.
Grid2D default_grid(Problem p);

struct ContinuousState {
  double pos = 0.0;  // position, or pole angle
  double vel = 0.0;  // velocity, or angular speed
};

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

/// One step of the underpowered car: velocity picks up 0.001 * accel minus
/// the 0.0025 cos(3x) gravity term, then position advances by the new
/// velocity. Both variables clip to the grid box; a position clipped at the
/// lower bound also zeroes the velocity (inelastic wall).
ContinuousState mountain_car_step(ContinuousState s, double accel, const Grid2D& grid);

/// Euler step of the damped pendulum, dt = 0.3, with both derivatives read
/// from the pre-step state. The angle wraps into (-pi, pi], the speed clips
/// to the grid box.
ContinuousState pendulum_step(ContinuousState s, double torque, const Grid2D& grid);

/// 10 at or beyond the hilltop x = 0.5, otherwise -1 per step.
double mountain_car_reward(double x);

/// exp(cos(theta) - 1) - 0.1 * torque^2; peaks at 1 for the upright pole.
double pendulum_reward(double theta, double torque);

bool mountain_car_goal(double x);

ContinuousState step(Problem p, ContinuousState s, double action, const Grid2D& grid);
double reward(Problem p, ContinuousState s, double action);

/// Bilinear weights of the grid cell enclosing a continuous state: up to
/// four corner states with nonnegative weights summing to one. Corners with
/// exactly zero weight are dropped, so on-node queries return one corner.
struct CellWeights {
  std::array<int, 4> state{};
  std::array<double, 4> weight{};
  int count = 0;
};

CellWeights interpolate(const Grid2D& grid, ContinuousState s);

/// Finite MDP over grid states with at most four successors per
/// state-action pair. Transition storage is action-major so a value
/// iteration sweep walks it contiguously.
class TabularMdp {
 public:
  static constexpr int kMaxSuccessors = 4;

  TabularMdp(int n_states, int n_actions);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_successors(int s, int a) const { return counts_[flat(s, a)]; }

  std::span<const std::int32_t> successors(int s, int a) const {
    const std::size_t f = flat(s, a);
    return {succ_.data() + f * kMaxSuccessors, static_cast<std::size_t>(counts_[f])};
  }
  std::span<const double> probabilities(int s, int a) const {
    const std::size_t f = flat(s, a);
    return {prob_.data() + f * kMaxSuccessors, static_cast<std::size_t>(counts_[f])};
  }

  void set_row(int s, int a, const CellWeights& w);

  Matrix rewards;  // n_states x n_actions

 private:
  std::size_t flat(int s, int a) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(n_states_) +
           static_cast<std::size_t>(s);
  }

  int n_states_ = 0;
  int n_actions_ = 0;
  std::vector<std::uint8_t> counts_;
  std::vector<std::int32_t> succ_;
  std::vector<double> prob_;
};

/// Discretizes the named problem on the grid: each non-terminal (s, a) row
/// steps the dynamics from the node state and spreads the outcome over the
/// enclosing cell's corners. Mountain-car states at or past the goal become
/// absorbing self-loops with zero reward.
TabularMdp build_tabular(Problem p, const Grid2D& grid);

}  // namespace lrq
