#ifndef CHARGENET_ORACLE_HPP
#define CHARGENET_ORACLE_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "chargenet/automaton.hpp"
#include "chargenet/costs.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/problem.hpp"

namespace chargenet {

inline constexpr double kOracleLimit = 1e7;

/// (2 + max out-degree)^(horizon * cars): wait, charge and every departure.
inline double oracle_search_bound(const ScheduleProblem& p) {
  std::size_t degree = 0;
  for (NodeId i = 1; i <= p.graph.size(); ++i) {
    degree = std::max(degree, neighbors(p.graph, i).size());
  }
  const double exponent = static_cast<double>(p.horizon * p.cars.size());
  return std::pow(static_cast<double>(degree + 2), exponent);
}

namespace oracle_detail {

struct Enumerator {
  const ScheduleProblem& p;
  TrajectorySet current;
  std::vector<DiscreteInput> prev;
  std::optional<Plan> best_plan;
  double best_cost = 0.0;
  std::uint64_t leaves = 0;

  Plan current_plan() const {
    Plan out;
    for (const auto& car : current.cars) {
      out.push_back(car.inputs);
    }
    return out;
  }

  void leaf() {
    ++leaves;
    if (p.terminal_required && !reaches_goals(p, current)) {
      return;
    }
    const double cost = p.evaluate(current).total;
    if (!best_plan) {
      best_plan = current_plan();
      best_cost = cost;
      return;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(best_cost));
    if (cost < best_cost - tol) {
      best_plan = current_plan();
      best_cost = cost;
    } else if (std::abs(cost - best_cost) <= tol) {
      Plan candidate = current_plan();
      if (candidate < *best_plan) {
        best_plan = std::move(candidate);
        best_cost = std::min(best_cost, cost);
      }
    }
  }

  void walk(std::size_t k, std::size_t c, WorldContext ctx) {
    if (c == current.cars.size()) {
      ctx.next_step();
      walk(k + 1, 0, std::move(ctx));
      return;
    }
    if (k == p.horizon) {
      leaf();
      return;
    }
    CarTrajectory& car = current.cars[c];
    const VehicleState s = car.states.back();
    const DiscreteInput before = prev[c];
    for (const Move& m : successors(s, ctx, before, p.vehicle)) {
      WorldContext next = ctx;
      next.commit(detail::resting_node(s, p.graph), m.input);
      car.states.push_back(m.next);
      car.inputs.push_back(m.input);
      prev[c] = m.input;
      walk(k, c + 1, std::move(next));
      car.states.pop_back();
      car.inputs.pop_back();
      prev[c] = before;
    }
  }
};

}  // namespace oracle_detail

/// Exhaustive enumeration of every feasible joint plan, scored with
/// total_cost. Equal costs go to the lexicographically smallest plan
/// (car-major). Refuses problems above the size limit.
inline Solution brute_force_oracle(const ScheduleProblem& problem) {
  problem.validate();
  const double bound = oracle_search_bound(problem);
  if (!(bound <= kOracleLimit)) {
    std::ostringstream msg;
    msg << "brute_force_oracle: search bound " << bound << " exceeds " << kOracleLimit;
    throw ArgumentError(msg.str());
  }
  const auto started = std::chrono::steady_clock::now();
  oracle_detail::Enumerator e{problem, {}, {}, std::nullopt, 0.0, 0};
  for (const auto& st : problem.initial_starts()) {
    e.current.cars.push_back(CarTrajectory{{st.state}, {}});
    e.prev.push_back(st.previous);
  }
  e.walk(0, 0, problem.initial_context());

  Solution out;
  out.nodes_explored = e.leaves;
  if (e.best_plan) {
    out.status = SolveStatus::Optimal;
    out.inputs = *e.best_plan;
    out.trajectories = simulate_execution(problem.initial_starts(), out.inputs,
                                          problem.initial_context(), problem.vehicle);
    out.cost = problem.evaluate(out.trajectories);
  } else {
    out.status = SolveStatus::Infeasible;
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace chargenet

#endif
