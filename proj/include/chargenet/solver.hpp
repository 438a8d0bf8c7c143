#ifndef CHARGENET_SOLVER_HPP
#define CHARGENET_SOLVER_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <thread>
#include <utility>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/costs.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/problem.hpp"

namespace chargenet {

struct SolveOptions {
  std::uint64_t node_budget = 1'000'000;
  bool prune_cost = true;
  bool prune_reachability = true;
  bool prune_energy = true;
  /// Drop a step-boundary state already reached at no higher cost.
  bool prune_dominated = true;
  std::size_t dominance_table_limit = 4'000'000;
  /// Known-feasible plan used as the starting incumbent.
  std::optional<Plan> seed_plan;
  unsigned threads = 1;
};

namespace solver_detail {

constexpr long kUnreachable = std::numeric_limits<long>::max() / 4;

/// Steps needed to finish edge i -> j from progress `from` at the fastest
/// admissible speed. Mirrors the arithmetic of detail::drive.
inline long steps_to_finish(const HighwayGraph& g, NodeId i, NodeId j, double from,
                            const MotionParams& mp) {
  const double v = incremental_velocity(g, i, j, 0.0, mp);
  const double len = g.length(i, j);
  long count = 0;
  double progress = from;
  while (true) {
    ++count;
    if (progress + v >= len) {
      return count;
    }
    progress += v;
  }
}

/// Fewest steps from every node to `goal` (Dijkstra on the reversed graph).
inline std::vector<long> steps_to_goal_table(const HighwayGraph& g, NodeId goal,
                                             const MotionParams& mp) {
  const std::size_t n = g.size();
  std::vector<long> dist(n + 1, kUnreachable);
  using Item = std::pair<long, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[goal] = 0;
  queue.push({0, goal});
  while (!queue.empty()) {
    const auto [d, j] = queue.top();
    queue.pop();
    if (d != dist[j]) {
      continue;
    }
    for (NodeId i = 1; i <= n; ++i) {
      if (i == j || !g.has_arc(i, j)) {
        continue;
      }
      const long cand = d + steps_to_finish(g, i, j, 0.0, mp);
      if (cand < dist[i]) {
        dist[i] = cand;
        queue.push({cand, i});
      }
    }
  }
  return dist;
}

struct CarProgress {
  VehicleState state;
  DiscreteInput prev;
  long waits = 0;
  long charges = 0;
  bool session_open = false;
  double session_start = 0.0;
  std::size_t session_first = 0;
  std::size_t session_steps = 0;
  long to_goal = 0;
};

struct SharedIncumbent {
  std::mutex mutex;
  std::atomic<double> cost{std::numeric_limits<double>::infinity()};
  std::optional<Plan> plan;
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> exhausted{false};

  void offer(double c, const Plan& p) {
    std::lock_guard lock(mutex);
    if (c < cost.load()) {
      cost.store(c);
      plan = p;
    }
  }
};

class Search {
public:
  Search(const ScheduleProblem& problem, const SolveOptions& options, SharedIncumbent& shared)
      : p_(problem), opt_(options), shared_(shared), ctx_(problem.initial_context()) {
    const std::size_t n = p_.graph.size();
    const auto& mp = p_.vehicle.motion;
    const auto& bp = p_.vehicle.battery;
    for (const auto& car : p_.cars) {
      goal_tables_.push_back(steps_to_goal_table(p_.graph, car.goal, mp));
    }
    const auto starts = p_.initial_starts();
    for (std::size_t c = 0; c < starts.size(); ++c) {
      CarProgress cp;
      cp.state = starts[c].state;
      cp.prev = starts[c].previous;
      cp.to_goal = steps_to_goal(c, cp.state);
      cars_.push_back(cp);
    }
    plan_.assign(p_.cars.size(), {});
    const auto& w = p_.weights;
    for (NodeId node = 1; node <= n; ++node) {
      const int usable = std::max(0, std::min(ctx_.chargers(node), static_cast<int>(p_.cars.size())));
      double best = std::numeric_limits<double>::infinity();
      for (int u = 0; u <= usable; ++u) {
        const double pref = p_.graph.station(node).preferred_capacity;
        if (pref == 0.0 && u != 0) {
          continue;
        }
        best = std::min(best, station_term(u, pref, w.station_unit_cost, w.station_variant));
      }
      station_floor_ += best;
      const double idle = station_term(0, p_.graph.station(node).preferred_capacity,
                                       w.station_unit_cost, w.station_variant);
      station_idle_ += idle;
      for (int u = 1; u <= usable; ++u) {
        const double drop = idle - station_term(u, p_.graph.station(node).preferred_capacity,
                                                w.station_unit_cost, w.station_variant);
        charge_saving_ = std::max(charge_saving_, drop / u);
      }
    }
    bool prices_ok = true;
    if (w.electricity_enabled) {
      for (const auto& row : w.electricity_price) {
        for (const double price : row) {
          prices_ok = prices_ok && price >= 0.0;
        }
      }
    }
    cost_prune_ok_ = opt_.prune_cost && bp.deg_a() >= 0.0 && bp.deg_b() >= 0.0 && bp.deg_c() >= 0.0 && prices_ok;
    dominance_ok_ = opt_.prune_dominated;
    energy_prune_ok_ = opt_.prune_energy &&
                       !(mp.congestion_coupling && mp.drive_power_per_speed.has_value());
    drive_step_energy_ = kwh(mp.drive_power_at(mp.base_speed), mp.t_s);
    charge_step_energy_ = kwh(bp.p_max(), mp.t_s);
  }

  /// Plays a fixed plan through the same cost accounting. Returns its cost, or
  /// nullopt when the plan is inadmissible or misses a goal.
  std::optional<double> replay(const Plan& plan) {
    if (plan.size() != p_.cars.size()) {
      return std::nullopt;
    }
    for (const auto& seq : plan) {
      if (seq.size() != p_.horizon) {
        return std::nullopt;
      }
    }
    double cost = 0.0;
    for (std::size_t k = 0; k < p_.horizon; ++k) {
      for (std::size_t c = 0; c < p_.cars.size(); ++c) {
        const auto moves = successors(cars_[c].state, ctx_, cars_[c].prev, p_.vehicle);
        const auto it = std::find_if(moves.begin(), moves.end(),
                                     [&](const Move& m) { return m.input == plan[c][k]; });
        if (it == moves.end()) {
          return std::nullopt;
        }
        cost += apply(c, k, *it);
      }
      cost += close_step();
    }
    if (!at_goals()) {
      return std::nullopt;
    }
    return cost + open_session_costs();
  }

  /// Depth-first search from step `k`, car `c`.
  void run(std::size_t k, std::size_t c, double cost) {
    if (shared_.exhausted.load(std::memory_order_relaxed)) {
      return;
    }
    if (c == p_.cars.size()) {
      const double step_cost = close_step_cost();
      auto saved_prev_occ = ctx_.previous_occupancy;
      auto saved_prev_flow = ctx_.previous_edge_flow;
      auto saved_occ = ctx_.occupancy;
      auto saved_flow = ctx_.edge_flow;
      ctx_.next_step();
      run(k + 1, 0, cost + step_cost);
      ctx_.previous_occupancy = std::move(saved_prev_occ);
      ctx_.previous_edge_flow = std::move(saved_prev_flow);
      ctx_.occupancy = std::move(saved_occ);
      ctx_.edge_flow = std::move(saved_flow);
      --ctx_.step;
      return;
    }
    if (k > 0 && k < p_.horizon && c == 0 && dominance_ok_ && dominated(k, cost)) {
      return;
    }
    if (k == p_.horizon) {
      if (p_.terminal_required && !at_goals()) {
        return;
      }
      const double total = cost + open_session_costs();
      if (total < shared_.cost.load()) {
        shared_.offer(total, plan_);
      }
      return;
    }
    const auto moves = ordered_moves(c);
    for (const Move& move : moves) {
      if (shared_.nodes.fetch_add(1, std::memory_order_relaxed) >= opt_.node_budget) {
        shared_.exhausted.store(true);
        return;
      }
      const CarProgress saved = cars_[c];
      const NodeId node_before = detail::resting_node(saved.state, p_.graph);
      const double inc = apply(c, k, move);
      if (!pruned(k, c, cost + inc)) {
        run(k, c + 1, cost + inc);
      }
      undo(c, node_before, move.input, saved);
      if (shared_.exhausted.load(std::memory_order_relaxed)) {
        return;
      }
    }
  }

  /// True when this step-boundary state was already reached at no higher cost.
  bool dominated(std::size_t k, double cost) {
    std::string key;
    key.reserve(16 + cars_.size() * 64);
    auto put = [&key](const auto& v) {
      key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    put(k);
    for (const auto& cp : cars_) {
      put(cp.state.energy);
      put(cp.state.trip_distance);
      put(cp.state.edge_progress);
      put(cp.state.position.from);
      put(cp.state.position.to);
      put(cp.prev.gamma);
      put(cp.prev.charge);
      put(cp.prev.edge.value);
      put(cp.waits);
      put(cp.charges);
      put(cp.session_open);
      if (cp.session_open) {
        put(cp.session_start);
        put(cp.session_first);
        put(cp.session_steps);
      }
    }
    for (int v : ctx_.previous_occupancy) {
      put(v);
    }
    if (p_.vehicle.motion.congestion_coupling) {
      for (int v : ctx_.previous_edge_flow) {
        put(v);
      }
    }
    const auto it = seen_.find(key);
    if (it != seen_.end()) {
      if (it->second <= cost) {
        return true;
      }
      it->second = cost;
      return false;
    }
    if (seen_.size() < opt_.dominance_table_limit) {
      seen_.emplace(std::move(key), cost);
    }
    return false;
  }

  /// Children of the root, in search order.
  std::vector<Move> root_moves() { return ordered_moves(0); }

  /// Applies one root move; used to split work between threads.
  double force_root(const Move& move) { return apply(0, 0, move); }

private:
  long steps_to_goal(std::size_t c, const VehicleState& s) const {
    if (!p_.terminal_required) {
      return 0;
    }
    const auto& table = goal_tables_[c];
    if (s.position.at_node()) {
      return table[s.position.node()];
    }
    const long rest =
        steps_to_finish(p_.graph, s.position.from, s.position.to, s.edge_progress, p_.vehicle.motion);
    const long tail = table[s.position.to];
    return tail >= kUnreachable ? kUnreachable : rest + tail;
  }

  std::vector<Move> ordered_moves(std::size_t c) {
    auto moves = successors(cars_[c].state, ctx_, cars_[c].prev, p_.vehicle);
    std::vector<std::pair<long, std::size_t>> order;
    order.reserve(moves.size());
    for (std::size_t i = 0; i < moves.size(); ++i) {
      order.emplace_back(steps_to_goal(c, moves[i].next), i);
    }
    // Stable on the input order, which successors() already sorted.
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Move> out;
    out.reserve(moves.size());
    for (const auto& [unused, i] : order) {
      out.push_back(std::move(moves[i]));
    }
    return out;
  }

  double session_cost(const CarProgress& cp, std::size_t c, double end_energy) const {
    const ChargingSession s{c, cp.session_first, cp.session_steps, end_energy - cp.session_start};
    return session_degradation(s, p_.vehicle.battery, p_.vehicle.motion.t_s);
  }

  /// Stage cost of car c taking `move` at step k; updates the shared counters.
  double apply(std::size_t c, std::size_t k, const Move& move) {
    CarProgress& cp = cars_[c];
    const auto& w = p_.weights;
    const DiscreteInput& u = move.input;
    const NodeId node = detail::resting_node(cp.state, p_.graph);
    double inc = 0.0;
    const Mode mode = mode_select(u);
    if (mode == Mode::Charging) {
      inc += w.charging_time_weight * (2.0 * static_cast<double>(cp.charges) + 1.0);
      ++cp.charges;
      if (w.electricity_enabled) {
        inc += w.price(node, k + p_.step_offset) * (move.next.energy - cp.state.energy);
      }
      if (!cp.session_open) {
        cp.session_open = true;
        cp.session_start = cp.state.energy;
        cp.session_first = k;
        cp.session_steps = 0;
      }
      ++cp.session_steps;
    } else {
      if (cp.session_open) {
        inc += session_cost(cp, c, cp.state.energy);
        cp.session_open = false;
      }
      if (mode == Mode::Waiting) {
        inc += w.waiting_time_weight * (2.0 * static_cast<double>(cp.waits) + 1.0);
        ++cp.waits;
      } else {
        const int v = ctx_.edge_flow[u.edge.value - 1];
        inc += w.congestion_weight * (2.0 * v + 1.0);
      }
    }
    ctx_.commit(node, u);
    cp.state = move.next;
    cp.prev = u;
    cp.to_goal = steps_to_goal(c, cp.state);
    plan_[c].push_back(u);
    return inc;
  }

  void undo(std::size_t c, NodeId node_before, const DiscreteInput& u, const CarProgress& saved) {
    if (u.gamma && u.charge) {
      --ctx_.occupancy[node_before - 1];
    } else if (!u.gamma) {
      --ctx_.edge_flow[u.edge.value - 1];
    }
    cars_[c] = saved;
    plan_[c].pop_back();
  }

  double close_step_cost() const {
    const auto& w = p_.weights;
    double total = 0.0;
    for (NodeId n = 1; n <= p_.graph.size(); ++n) {
      total += station_term(ctx_.occupancy[n - 1], p_.graph.station(n).preferred_capacity,
                            w.station_unit_cost, w.station_variant);
    }
    return total;
  }

  double close_step() {
    const double c = close_step_cost();
    ctx_.next_step();
    return c;
  }

  double open_session_costs() const {
    double total = 0.0;
    for (std::size_t c = 0; c < cars_.size(); ++c) {
      if (cars_[c].session_open) {
        total += session_cost(cars_[c], c, cars_[c].state.energy);
      }
    }
    return total;
  }

  bool at_goals() const {
    for (std::size_t c = 0; c < cars_.size(); ++c) {
      const auto& pos = cars_[c].state.position;
      if (!pos.at_node() || pos.node() != p_.cars[c].goal) {
        return false;
      }
    }
    return true;
  }

  /// Checks after car c has acted at step k.
  bool pruned(std::size_t k, std::size_t c, double cost) const {
    const long horizon = static_cast<long>(p_.horizon);
    const CarProgress& cp = cars_[c];
    const long remaining = horizon - static_cast<long>(k) - 1;
    if (opt_.prune_reachability && p_.terminal_required && cp.to_goal > remaining) {
      return true;
    }
    if (energy_prune_ok_ && p_.terminal_required && cp.to_goal <= remaining) {
      const double best_end = cp.state.energy +
                              static_cast<double>(remaining - cp.to_goal) * charge_step_energy_ -
                              static_cast<double>(cp.to_goal) * drive_step_energy_;
      const double slack = 1e-9 * std::max(1.0, p_.vehicle.battery.e_max());
      if (best_end < p_.vehicle.battery.e_min() - slack) {
        return true;
      }
    }
    if (cost_prune_ok_) {
      const double steps_left = static_cast<double>(horizon - static_cast<long>(k));
      // Station terms at their floor, cars at their cheapest.
      double floor_bound = cost + station_floor_ * steps_left;
      // Idle stations, with each charging car worth at most one saving.
      double idle_bound = cost + station_idle_ * steps_left;
      for (const int occupied : ctx_.occupancy) {
        idle_bound -= charge_saving_ * occupied;
      }
      for (std::size_t i = 0; i < cars_.size(); ++i) {
        const long r = i <= c ? remaining : remaining + 1;
        floor_bound += car_floor(cars_[i], r, 0.0);
        idle_bound += car_floor(cars_[i], r, charge_saving_);
      }
      if (std::max(floor_bound, idle_bound) >= shared_.cost.load(std::memory_order_relaxed)) {
        return true;
      }
    }
    return false;
  }

  /// Cheapest way to spend r more steps: the drives still needed, then the
  /// cheapest marginal among waiting, charging (less `rebate`) and extra
  /// driving each step.
  double car_floor(const CarProgress& cp, long r, double rebate) const {
    const auto& w = p_.weights;
    const long m = std::min(cp.to_goal, r);
    double total = static_cast<double>(m) * w.congestion_weight;
    double waits = static_cast<double>(cp.waits);
    double charges = static_cast<double>(cp.charges);
    for (long i = m; i < r; ++i) {
      const double wait = w.waiting_time_weight * (2.0 * waits + 1.0);
      const double charge = w.charging_time_weight * (2.0 * charges + 1.0) - rebate;
      const double best = std::min({wait, charge, w.congestion_weight});
      total += best;
      if (best == wait) {
        waits += 1.0;
      } else if (best == charge) {
        charges += 1.0;
      }
    }
    return total;
  }

  const ScheduleProblem& p_;
  const SolveOptions& opt_;
  SharedIncumbent& shared_;
  WorldContext ctx_;
  std::vector<std::vector<long>> goal_tables_;
  std::vector<CarProgress> cars_;
  Plan plan_;
  double station_floor_ = 0.0;
  double station_idle_ = 0.0;
  double charge_saving_ = 0.0;
  double drive_step_energy_ = 0.0;
  double charge_step_energy_ = 0.0;
  bool cost_prune_ok_ = true;
  bool dominance_ok_ = true;
  std::unordered_map<std::string, double> seen_;
  bool energy_prune_ok_ = true;
};

}  // namespace solver_detail

/// Exact depth-first branch and bound over the joint admissible inputs.
/// Cars branch one after another within a step, so station capacity is
/// enforced while branching.
inline Solution solve_exact(const ScheduleProblem& problem, const SolveOptions& options = {}) {
  problem.validate();
  const auto started = std::chrono::steady_clock::now();
  solver_detail::SharedIncumbent shared;

  if (options.seed_plan) {
    solver_detail::Search probe(problem, options, shared);
    const auto seeded = probe.replay(*options.seed_plan);
    if (!seeded) {
      throw ArgumentError("solve_exact: seed plan is not a feasible plan for this problem");
    }
    shared.cost.store(*seeded);
    shared.plan = *options.seed_plan;
  }

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1) {
    solver_detail::Search search(problem, options, shared);
    search.run(0, 0, 0.0);
  } else {
    solver_detail::Search root(problem, options, shared);
    const auto moves = root.root_moves();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= moves.size() || shared.exhausted.load()) {
          return;
        }
        if (shared.nodes.fetch_add(1) >= options.node_budget) {
          shared.exhausted.store(true);
          return;
        }
        solver_detail::Search search(problem, options, shared);
        const double inc = search.force_root(moves[i]);
        search.run(0, 1, inc);
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, moves.size()); ++t) {
      pool.emplace_back(worker);
    }
  }

  Solution out;
  out.nodes_explored = std::min<std::uint64_t>(shared.nodes.load(), options.node_budget);
  if (shared.plan) {
    out.inputs = *shared.plan;
    out.trajectories = simulate_execution(problem.initial_starts(), out.inputs,
                                          problem.initial_context(), problem.vehicle);
    out.cost = problem.evaluate(out.trajectories);
    out.status = shared.exhausted.load() ? SolveStatus::BudgetExhausted : SolveStatus::Optimal;
  } else {
    out.status = shared.exhausted.load() ? SolveStatus::BudgetExhausted : SolveStatus::Infeasible;
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace chargenet

#endif
