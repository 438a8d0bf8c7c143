#ifndef CHARGENET_RHC_HPP
#define CHARGENET_RHC_HPP

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/problem.hpp"
#include "chargenet/solver.hpp"

namespace chargenet {

/// What the loop carries from one plan to the next. A disturbance hook may
/// edit any of it (block chargers, drain a battery) before the next solve.
struct ClosedLoopState {
  std::size_t step = 0;  // steps applied so far
  std::vector<CarStart> cars;
  std::vector<int> previous_occupancy;
  std::vector<int> previous_edge_flow;
  std::vector<int> blocked;
};

using DisturbanceHook = std::function<void(ClosedLoopState&)>;

struct ClosedLoopResult {
  TrajectorySet trace;
  std::size_t solves = 0;
  CostBreakdown cost;
};

/// Raised when a replan fails; carries everything applied before it.
class ClosedLoopError : public std::runtime_error {
public:
  ClosedLoopError(const std::string& what, TrajectorySet prefix, std::size_t step)
      : std::runtime_error(what), prefix_(std::move(prefix)), step_(step) {}

  [[nodiscard]] const TrajectorySet& prefix() const noexcept { return prefix_; }
  [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
  TrajectorySet prefix_;
  std::size_t step_;
};

struct RhcOptions {
  std::size_t replan_every = 1;
  /// Guard against loops that never finish; 0 means 8 * horizon.
  std::size_t max_steps = 0;
  SolveOptions solve;
};

inline ClosedLoopResult rhc_loop(const ScheduleProblem& problem, const RhcOptions& options,
                                 const DisturbanceHook& hook = {}) {
  problem.validate();
  if (options.replan_every < 1) {
    throw ArgumentError("rhc_loop: replan_every must be at least 1");
  }
  const std::size_t n = problem.graph.size();
  const std::size_t max_steps = options.max_steps == 0 ? 8 * problem.horizon : options.max_steps;

  ClosedLoopState state;
  state.cars = problem.initial_starts();
  const WorldContext first = problem.initial_context();
  state.previous_occupancy = first.previous_occupancy;
  state.previous_edge_flow = first.previous_edge_flow;
  state.blocked = first.blocked;

  ClosedLoopResult out;
  for (const auto& c : state.cars) {
    out.trace.cars.push_back(CarTrajectory{{c.state}, {}});
  }

  while (true) {
    if (hook) {
      hook(state);
      if (state.cars.size() != problem.cars.size() || state.blocked.size() != n ||
          state.previous_occupancy.size() != n || state.previous_edge_flow.size() != n * n) {
        throw ArgumentError("rhc_loop: disturbance hook changed the state shape");
      }
      // Keep the trace continuous with whatever the hook changed.
      for (std::size_t c = 0; c < state.cars.size(); ++c) {
        out.trace.cars[c].states.back() = state.cars[c].state;
      }
    }
    ScheduleProblem sub = problem;
    sub.starts = state.cars;
    sub.previous_occupancy = state.previous_occupancy;
    sub.previous_edge_flow = state.previous_edge_flow;
    sub.blocked_chargers = state.blocked;
    sub.step_offset = problem.step_offset + state.step;
    // Goals keep their original deadline. A window that slides with the loop
    // lets every plan postpone arrival to its last step, so cars never arrive.
    sub.horizon = problem.horizon > state.step ? problem.horizon - state.step : problem.horizon;
    const std::size_t apply = std::min(options.replan_every, sub.horizon);

    const Solution sol = solve_exact(sub, options.solve);
    ++out.solves;
    if (sol.inputs.empty()) {
      throw ClosedLoopError("rhc_loop: replan at step " + std::to_string(state.step) + " is " +
                                to_string(sol.status),
                            out.trace, state.step);
    }
    Plan prefix;
    for (const auto& seq : sol.inputs) {
      prefix.emplace_back(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(apply));
    }
    WorldContext ctx = sub.initial_context();
    const TrajectorySet applied = simulate_in_place(state.cars, prefix, ctx, problem.vehicle);
    for (std::size_t c = 0; c < state.cars.size(); ++c) {
      auto& dst = out.trace.cars[c];
      const auto& src = applied.cars[c];
      dst.states.insert(dst.states.end(), src.states.begin() + 1, src.states.end());
      dst.inputs.insert(dst.inputs.end(), src.inputs.begin(), src.inputs.end());
      state.cars[c] = CarStart{src.states.back(), src.inputs.back()};
    }
    state.previous_occupancy = ctx.previous_occupancy;
    state.previous_edge_flow = ctx.previous_edge_flow;
    state.step += apply;

    bool done = true;
    for (std::size_t c = 0; c < state.cars.size(); ++c) {
      const Position& pos = state.cars[c].state.position;
      done = done && pos.at_node() && pos.node() == problem.cars[c].goal;
    }
    if (done) {
      break;
    }
    if (state.step >= max_steps) {
      throw ClosedLoopError("rhc_loop: goals not reached within " + std::to_string(max_steps) +
                                " steps",
                            out.trace, state.step);
    }
  }
  out.cost = total_cost(out.trace, problem.graph, problem.weights, problem.vehicle.battery,
                        problem.vehicle.motion.t_s, problem.step_offset);
  return out;
}

}  // namespace chargenet

#endif
