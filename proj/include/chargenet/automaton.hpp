#ifndef CHARGENET_AUTOMATON_HPP
#define CHARGENET_AUTOMATON_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "chargenet/errors.hpp"
#include "chargenet/network.hpp"
#include "chargenet/vehicle.hpp"

namespace chargenet {

/// Per-step decision of one car: gamma (stay at / arrive at a node), charge
/// (plugged in, implies gamma) and the selected edge. The one-hot edge vector
/// is stored as its single set index; one_hot() expands it.
struct DiscreteInput {
  bool gamma = true;
  bool charge = false;
  EdgeIndex edge;

  /// Lexicographic on (gamma, charge, edge); solver tie-breaking relies on it.
  friend auto operator<=>(const DiscreteInput&, const DiscreteInput&) = default;
};

inline std::vector<bool> one_hot(const DiscreteInput& u, std::size_t n) {
  std::vector<bool> v(n * n, false);
  if (u.edge.value >= 1 && u.edge.value <= n * n) {
    v[u.edge.value - 1] = true;
  }
  return v;
}

/// Index of the "parked at i" sentinel (i, i). It is never traversable.
inline EdgeIndex parked_at(NodeId i, std::size_t n) { return edge_index(i, i, n); }

struct VehicleParams {
  BatteryParams battery;
  MotionParams motion;
};

struct EventFlags {
  bool edge_complete = false;   // reached or passed the end of the current edge
  bool moving_on_edge = false;  // strictly inside the current edge

  friend bool operator==(const EventFlags&, const EventFlags&) = default;
};

/// Shared per-step bookkeeping between cars. Vectors are indexed by node-1
/// (stations) or h-1 (edges).
struct WorldContext {
  const HighwayGraph* graph = nullptr;
  std::size_t step = 0;
  std::vector<int> occupancy;           // cars charging at each node this step, committed so far
  std::vector<int> previous_occupancy;  // cars charging at each node during the previous step
  std::vector<int> blocked;             // chargers held by vehicles outside the model
  std::vector<int> edge_flow;           // cars driving on each edge this step, committed so far
  std::vector<int> previous_edge_flow;

  static WorldContext fresh(const HighwayGraph& g) {
    WorldContext ctx;
    ctx.graph = &g;
    ctx.occupancy.assign(g.size(), 0);
    ctx.previous_occupancy.assign(g.size(), 0);
    ctx.blocked.assign(g.size(), 0);
    ctx.edge_flow.assign(g.size() * g.size(), 0);
    ctx.previous_edge_flow.assign(g.size() * g.size(), 0);
    return ctx;
  }

  [[nodiscard]] int chargers(NodeId n) const {
    return graph->station(n).capacity - blocked[n - 1];
  }

  /// Records the effect of a car's step on the shared counters.
  void commit(NodeId node_before, const DiscreteInput& u) {
    if (u.gamma && u.charge) {
      ++occupancy[node_before - 1];
    } else if (!u.gamma) {
      ++edge_flow[u.edge.value - 1];
    }
  }

  void next_step() {
    previous_occupancy = occupancy;
    std::fill(occupancy.begin(), occupancy.end(), 0);
    previous_edge_flow = edge_flow;
    std::fill(edge_flow.begin(), edge_flow.end(), 0);
    ++step;
  }
};

inline EventFlags event_generator(const VehicleState& s, const HighwayGraph& graph) {
  if (s.position.at_node()) {
    return {};
  }
  const double len = graph.length(s.position.from, s.position.to);
  return EventFlags{s.edge_progress >= len, s.edge_progress > 0.0 && s.edge_progress < len};
}

/// gamma & charge -> Charging, gamma & !charge -> Waiting, !gamma -> Driving.
inline Mode mode_select(const DiscreteInput& u) {
  if (!u.gamma) {
    return Mode::Driving;
  }
  return u.charge ? Mode::Charging : Mode::Waiting;
}

struct Move {
  DiscreteInput input;
  VehicleState next;
};

namespace detail {

/// Node the car occupies for the purpose of waiting/charging, or 0 mid-edge.
inline NodeId resting_node(const VehicleState& s, const HighwayGraph& g) {
  if (s.position.at_node()) {
    return s.position.node();
  }
  return event_generator(s, g).edge_complete ? s.position.to : 0;
}

inline VehicleState drive(const VehicleState& s, NodeId i, NodeId j, const WorldContext& ctx,
                          const VehicleParams& vp) {
  const HighwayGraph& g = *ctx.graph;
  const EdgeIndex h = edge_index(i, j, g.size());
  const double velocity =
      incremental_velocity(g, i, j, ctx.previous_edge_flow[h.value - 1], vp.motion);
  VehicleState next = s;
  next.mode = Mode::Driving;
  next.energy = s.energy - kwh(vp.motion.drive_power_at(velocity), vp.motion.t_s);
  const double progress = s.position.at_node() ? 0.0 : s.edge_progress;
  const double len = g.length(i, j);
  if (progress + velocity >= len) {
    // Arrival lands on the node; only the remaining length counts as distance.
    next.trip_distance = s.trip_distance + (len - progress);
    next.edge_progress = 0.0;
    next.position = Position::at(j);
  } else {
    next.trip_distance = s.trip_distance + velocity;
    next.edge_progress = progress + velocity;
    next.position = Position::edge(i, j);
  }
  return next;
}

inline VehicleState stay(const VehicleState& s, NodeId node, Mode mode, const VehicleParams& vp) {
  VehicleState next = s;
  next.mode = mode;
  next.position = Position::at(node);
  next.edge_progress = 0.0;
  next.energy = step_energy(s, mode, vp.battery, vp.motion, 0.0);
  return next;
}

inline bool drive_ok(const VehicleState& next, const VehicleParams& vp) {
  return next.energy >= vp.battery.e_min() && next.trip_distance < vp.motion.d_max;
}

inline bool may_charge(NodeId node, const DiscreteInput& prev, const WorldContext& ctx) {
  const int chargers = ctx.chargers(node);
  // A car already plugged in may stay plugged in; newcomers wait one step
  // after the station was full.
  const bool continuing = prev.gamma && prev.charge;
  if (!continuing && ctx.previous_occupancy[node - 1] >= chargers) {
    return false;
  }
  return ctx.occupancy[node - 1] + 1 <= chargers;
}

}  // namespace detail

/// Every admissible (input, next state) pair, in ascending input order.
/// An empty result means the car is blocked.
inline std::vector<Move> successors(const VehicleState& s, const WorldContext& ctx,
                                    const DiscreteInput& prev, const VehicleParams& vp) {
  const HighwayGraph& g = *ctx.graph;
  const std::size_t n = g.size();
  std::vector<Move> out;
  const NodeId node = detail::resting_node(s, g);
  if (node == 0) {
    // Mid-edge: the only choice is to keep driving.
    const DiscreteInput u{false, false, edge_index(s.position.from, s.position.to, n)};
    VehicleState next = detail::drive(s, s.position.from, s.position.to, ctx, vp);
    if (detail::drive_ok(next, vp)) {
      out.push_back({u, next});
    }
    return out;
  }
  const bool arriving = !s.position.at_node();
  const EdgeIndex kept = prev.edge.value == 0 ? parked_at(node, n) : prev.edge;
  if (!arriving) {
    for (const NodeId j : neighbors(g, node)) {
      VehicleState next = detail::drive(s, node, j, ctx, vp);
      if (detail::drive_ok(next, vp)) {
        out.push_back({DiscreteInput{false, false, edge_index(node, j, n)}, std::move(next)});
      }
    }
  }
  out.push_back({DiscreteInput{true, false, kept}, detail::stay(s, node, Mode::Waiting, vp)});
  if (detail::may_charge(node, prev, ctx)) {
    out.push_back({DiscreteInput{true, true, kept}, detail::stay(s, node, Mode::Charging, vp)});
  }
  std::sort(out.begin(), out.end(),
            [](const Move& a, const Move& b) { return a.input < b.input; });
  return out;
}

inline std::vector<DiscreteInput> admissible_inputs(const VehicleState& s, const WorldContext& ctx,
                                                    const DiscreteInput& prev,
                                                    const VehicleParams& vp) {
  std::vector<DiscreteInput> out;
  for (auto& m : successors(s, ctx, prev, vp)) {
    out.push_back(m.input);
  }
  return out;
}

namespace detail {

inline std::string describe_rejection(const VehicleState& s, const DiscreteInput& u,
                                      const WorldContext& ctx, const DiscreteInput& prev,
                                      const VehicleParams& vp) {
  const HighwayGraph& g = *ctx.graph;
  const NodeId node = resting_node(s, g);
  if (u.charge && !u.gamma) {
    return "charging requested while not at a node";
  }
  if (node == 0) {
    if (u.gamma) {
      return "car is mid-edge and must keep driving";
    }
    return "driving step would strand the car or leave the trip-distance domain";
  }
  if (u.gamma && u.charge) {
    return "charging rejected: station " + std::to_string(node) + " is at capacity";
  }
  if (u.gamma) {
    return "waiting input must keep the current edge selection";
  }
  if (u.edge.value < 1 || u.edge.value > g.size() * g.size()) {
    return "edge index out of range";
  }
  const auto [i, j] = decode_edge(u.edge, g.size());
  if (i != node || i == j || !g.has_arc(i, j)) {
    return "edge " + std::to_string(i) + "->" + std::to_string(j) + " does not leave node " +
           std::to_string(node);
  }
  (void)prev;
  (void)vp;
  return "driving step would strand the car or leave the trip-distance domain";
}

}  // namespace detail

/// One step of the automaton. Throws ContractViolation for an input outside
/// admissible_inputs().
inline VehicleState transition(const VehicleState& s, const DiscreteInput& u,
                               const WorldContext& ctx, const DiscreteInput& prev,
                               const VehicleParams& vp) {
  for (auto& m : successors(s, ctx, prev, vp)) {
    if (m.input == u) {
      return m.next;
    }
  }
  const std::string why = detail::describe_rejection(s, u, ctx, prev, vp);
  if (why.rfind("driving step would strand", 0) == 0) {
    // Structurally valid drive that runs out of energy: car id unknown here.
    throw InfeasibleError(0, ctx.step, why);
  }
  throw ContractViolation("transition: inadmissible input (" + why + ")");
}

struct CarStart {
  VehicleState state;
  DiscreteInput previous;

  static CarStart parked(NodeId node, double energy, std::size_t n) {
    VehicleState s;
    s.energy = energy;
    s.position = Position::at(node);
    return CarStart{s, DiscreteInput{true, false, parked_at(node, n)}};
  }
};

/// states has one more entry than inputs; states[k + 1] results from inputs[k].
struct CarTrajectory {
  std::vector<VehicleState> states;
  std::vector<DiscreteInput> inputs;

  friend bool operator==(const CarTrajectory&, const CarTrajectory&) = default;
};

struct TrajectorySet {
  std::vector<CarTrajectory> cars;

  [[nodiscard]] std::size_t horizon() const { return cars.empty() ? 0 : cars.front().inputs.size(); }

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

/// Rolls all cars forward together. Within a step, cars act in ascending
/// index order against the shared station counters. Fails at the first
/// inadmissible step with the car id (1-based) and step index. `ctx` is left
/// at the step after the last one applied.
inline TrajectorySet simulate_in_place(const std::vector<CarStart>& starts,
                                       const std::vector<std::vector<DiscreteInput>>& inputs,
                                       WorldContext& ctx, const VehicleParams& vp) {
  if (inputs.size() != starts.size()) {
    throw ArgumentError("simulate_execution: one input sequence per car required");
  }
  const std::size_t horizon = inputs.empty() ? 0 : inputs.front().size();
  for (const auto& seq : inputs) {
    if (seq.size() != horizon) {
      throw ArgumentError("simulate_execution: input sequences must share one length");
    }
  }
  TrajectorySet out;
  std::vector<DiscreteInput> prev;
  for (const auto& st : starts) {
    out.cars.push_back(CarTrajectory{{st.state}, {}});
    prev.push_back(st.previous);
  }
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t c = 0; c < starts.size(); ++c) {
      const VehicleState& s = out.cars[c].states.back();
      const DiscreteInput& u = inputs[c][k];
      const auto moves = successors(s, ctx, prev[c], vp);
      const auto it = std::find_if(moves.begin(), moves.end(),
                                   [&](const Move& m) { return m.input == u; });
      if (it == moves.end()) {
        throw InfeasibleError(c + 1, ctx.step, detail::describe_rejection(s, u, ctx, prev[c], vp));
      }
      ctx.commit(detail::resting_node(s, *ctx.graph), u);
      VehicleState next = it->next;
      out.cars[c].states.push_back(next);
      out.cars[c].inputs.push_back(u);
      prev[c] = u;
    }
    ctx.next_step();
  }
  return out;
}

inline TrajectorySet simulate_execution(const std::vector<CarStart>& starts,
                                        const std::vector<std::vector<DiscreteInput>>& inputs,
                                        WorldContext ctx, const VehicleParams& vp) {
  return simulate_in_place(starts, inputs, ctx, vp);
}

/// One exported row per (car, step): the input applied at that step and the
/// state it produced.
struct TrajectoryRecord {
  std::size_t car = 0;  // 1-based
  std::size_t step = 0;
  Mode mode = Mode::Waiting;
  std::string location;
  double edge_progress = 0.0;
  double trip_distance = 0.0;
  double energy = 0.0;
  bool gamma = true;
  bool charge = false;
  std::size_t edge = 0;
};

inline std::string location_name(const Position& p) {
  if (p.at_node()) {
    return "node:" + std::to_string(p.node());
  }
  return "edge:" + std::to_string(p.from) + "->" + std::to_string(p.to);
}

inline std::vector<TrajectoryRecord> trajectory_records(const TrajectorySet& t) {
  std::vector<TrajectoryRecord> out;
  for (std::size_t c = 0; c < t.cars.size(); ++c) {
    const auto& car = t.cars[c];
    for (std::size_t k = 0; k < car.inputs.size(); ++k) {
      const VehicleState& s = car.states[k + 1];
      const DiscreteInput& u = car.inputs[k];
      out.push_back(TrajectoryRecord{c + 1, k, s.mode, location_name(s.position), s.edge_progress,
                                     s.trip_distance, s.energy, u.gamma, u.charge, u.edge.value});
    }
  }
  return out;
}

}  // namespace chargenet

#endif
