#ifndef CHARGENET_PROBLEM_HPP
#define CHARGENET_PROBLEM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/costs.hpp"
#include "chargenet/network.hpp"
#include "chargenet/vehicle.hpp"

namespace chargenet {

struct CarRequest {
  NodeId start = 1;
  NodeId goal = 1;
  double initial_energy = 0.0;
};

/// Finite-horizon scheduling problem. By default every car starts parked at
/// its start node with an idle network; the receding-horizon loop overrides
/// the starting conditions through `starts` and the occupancy vectors.
struct ScheduleProblem {
  HighwayGraph graph;
  std::vector<CarRequest> cars;
  std::size_t horizon = 1;
  CostWeights weights;
  VehicleParams vehicle;
  /// When false, cars may end anywhere (used for degenerate what-if runs).
  bool terminal_required = true;

  std::optional<std::vector<CarStart>> starts;
  std::vector<int> previous_occupancy;  // empty means all zero
  std::vector<int> previous_edge_flow;  // empty means all zero
  std::vector<int> blocked_chargers;    // empty means all zero
  std::size_t step_offset = 0;          // absolute index of step 0, for price lookup

  [[nodiscard]] std::vector<CarStart> initial_starts() const {
    if (starts) {
      return *starts;
    }
    std::vector<CarStart> out;
    for (const auto& car : cars) {
      out.push_back(CarStart::parked(car.start, car.initial_energy, graph.size()));
    }
    return out;
  }

  /// Fresh context for step 0. Points into this problem's graph.
  [[nodiscard]] WorldContext initial_context() const {
    WorldContext ctx = WorldContext::fresh(graph);
    if (!previous_occupancy.empty()) {
      ctx.previous_occupancy = previous_occupancy;
    }
    if (!previous_edge_flow.empty()) {
      ctx.previous_edge_flow = previous_edge_flow;
    }
    if (!blocked_chargers.empty()) {
      ctx.blocked = blocked_chargers;
    }
    ctx.step = step_offset;
    return ctx;
  }

  [[nodiscard]] CostBreakdown evaluate(const TrajectorySet& t) const {
    return total_cost(t, graph, weights, vehicle.battery, vehicle.motion.t_s, step_offset);
  }

  [[nodiscard]] std::vector<std::string> violations() const {
    std::vector<std::string> out = validate_graph(graph).violations;
    if (!out.empty()) {
      return out;
    }
    const std::size_t n = graph.size();
    if (cars.empty()) {
      out.emplace_back("problem: at least one car required");
    }
    if (horizon < 1) {
      out.emplace_back("problem: horizon must be at least 1");
    }
    for (std::size_t c = 0; c < cars.size(); ++c) {
      const auto& car = cars[c];
      const std::string tag = "car " + std::to_string(c + 1) + ": ";
      if (!graph.valid_node(car.start) || !graph.valid_node(car.goal)) {
        out.push_back(tag + "start/goal must be valid nodes");
      }
      if (!(car.initial_energy >= vehicle.battery.e_min() &&
            car.initial_energy <= vehicle.battery.e_max())) {
        out.push_back(tag + "initial energy outside [e_min, e_max]");
      }
    }
    for (auto& v : vehicle.motion.violations(&graph)) {
      out.push_back(std::move(v));
    }
    for (auto& v : weights.violations(n, horizon)) {
      out.push_back(std::move(v));
    }
    if (starts && starts->size() != cars.size()) {
      out.emplace_back("problem: starts must list every car");
    }
    auto check_len = [&](const std::vector<int>& v, std::size_t len, const char* what) {
      if (!v.empty() && v.size() != len) {
        out.push_back(std::string("problem: ") + what + " has the wrong length");
      }
    };
    check_len(previous_occupancy, n, "previous_occupancy");
    check_len(previous_edge_flow, n * n, "previous_edge_flow");
    check_len(blocked_chargers, n, "blocked_chargers");
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) {
      std::string msg = "invalid problem";
      for (const auto& item : v) {
        msg += "; " + item;
      }
      throw ArgumentError(msg);
    }
  }
};

using Plan = std::vector<std::vector<DiscreteInput>>;  // [car][step]

enum class SolveStatus { Optimal, Infeasible, BudgetExhausted };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::BudgetExhausted:
      return "budget-exhausted";
  }
  return "?";
}

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  Plan inputs;
  TrajectorySet trajectories;
  CostBreakdown cost;
  std::uint64_t nodes_explored = 0;
  double wall_time = 0.0;  // seconds
};

/// True when every car ends parked at its goal.
inline bool reaches_goals(const ScheduleProblem& p, const TrajectorySet& t) {
  for (std::size_t c = 0; c < p.cars.size(); ++c) {
    const VehicleState& last = t.cars[c].states.back();
    if (!last.position.at_node() || last.position.node() != p.cars[c].goal) {
      return false;
    }
  }
  return true;
}

}  // namespace chargenet

#endif
