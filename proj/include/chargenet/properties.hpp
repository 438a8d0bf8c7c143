#ifndef CHARGENET_PROPERTIES_HPP
#define CHARGENET_PROPERTIES_HPP

#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/problem.hpp"

namespace chargenet {

struct PropertyVerdict {
  bool pass = true;
  std::string detail;
  std::size_t car = 0;  // 1-based car of the witness, 0 when none
  CarTrajectory witness;
};

struct PropertyReport {
  PropertyVerdict non_blocking;
  PropertyVerdict domain_preserving;
  PropertyVerdict non_zeno;
  PropertyVerdict capacity;
  std::size_t states_explored = 0;
  std::size_t nondeterministic_states = 0;
  std::size_t samples_run = 0;
  bool truncated = false;

  [[nodiscard]] bool all_pass() const {
    return non_blocking.pass && domain_preserving.pass && non_zeno.pass && capacity.pass;
  }
};

struct PropertyOptions {
  std::size_t depth = 8;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::size_t max_states = 200'000;  // per car
};

/// Domain violations, including the requirement of positive energy while driving.
inline std::vector<std::string> domain_violations(const VehicleState& s, const HighwayGraph& g,
                                                  const VehicleParams& vp) {
  auto out = state_violations(s, g, vp.battery, vp.motion);
  if (s.mode == Mode::Driving && !(s.energy > 0.0)) {
    out.emplace_back("driving with no energy left");
  }
  return out;
}

namespace property_detail {

struct Key {
  NodeId from, to;
  std::int64_t energy, distance, progress;
  bool gamma, charge;
  std::size_t edge;
  std::uint8_t mode;

  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) { h = (h ^ v) * 1099511628211ull; };
    mix(k.from);
    mix(k.to);
    mix(static_cast<std::uint64_t>(k.energy));
    mix(static_cast<std::uint64_t>(k.distance));
    mix(static_cast<std::uint64_t>(k.progress));
    mix((k.gamma ? 1u : 0u) | (k.charge ? 2u : 0u));
    mix(k.edge);
    mix(k.mode);
    return h;
  }
};

struct Quanta {
  double energy, distance, progress;

  Key key(const VehicleState& s, const DiscreteInput& prev) const {
    return Key{s.position.from,
               s.position.to,
               std::llround(s.energy / energy),
               std::llround(s.trip_distance / distance),
               std::llround(s.edge_progress / progress),
               prev.gamma,
               prev.charge,
               prev.edge.value,
               static_cast<std::uint8_t>(s.mode)};
  }
};

struct Visit {
  VehicleState state;
  DiscreteInput prev;
  std::size_t parent;  // index into the visit list; self for roots
  std::size_t depth;
};

inline CarTrajectory path_to(const std::vector<Visit>& visits, std::size_t at) {
  std::vector<std::size_t> chain;
  for (std::size_t i = at;; i = visits[i].parent) {
    chain.push_back(i);
    if (visits[i].parent == i) {
      break;
    }
  }
  CarTrajectory t;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    t.states.push_back(visits[*it].state);
    if (it != chain.rbegin()) {
      t.inputs.push_back(visits[*it].prev);
    }
  }
  return t;
}

}  // namespace property_detail

/// Breadth-first exploration of each car to `depth` steps with quantized
/// duplicate detection, followed by seeded random joint rollouts that also
/// exercise the shared station counters.
inline PropertyReport check_properties(const ScheduleProblem& problem,
                                       const PropertyOptions& options = {}) {
  using namespace property_detail;
  problem.validate();
  const HighwayGraph& g = problem.graph;
  const VehicleParams& vp = problem.vehicle;
  const Quanta quanta{1e-6 * (vp.battery.e_max() - vp.battery.e_min()), 1e-6 * vp.motion.d_max,
                      1e-6 * std::max(g.max_edge_length(), 1e-9)};
  PropertyReport report;
  report.non_zeno.detail = "exactly one discrete input is applied per car per step";

  auto domain_fail = [&](std::size_t car, const CarTrajectory& path, const std::string& why) {
    if (report.domain_preserving.pass) {
      report.domain_preserving = PropertyVerdict{false, why, car, path};
    }
  };

  const auto starts = problem.initial_starts();
  for (std::size_t c = 0; c < starts.size(); ++c) {
    const WorldContext ctx = problem.initial_context();
    std::vector<Visit> visits;
    std::unordered_map<Key, std::size_t, KeyHash> seen;
    std::deque<std::size_t> frontier;
    visits.push_back({starts[c].state, starts[c].previous, 0, 0});
    seen.emplace(quanta.key(starts[c].state, starts[c].previous), 0);
    frontier.push_back(0);
    while (!frontier.empty()) {
      const std::size_t at = frontier.front();
      frontier.pop_front();
      const Visit v = visits[at];
      if (auto bad = domain_violations(v.state, g, vp); !bad.empty()) {
        domain_fail(c + 1, path_to(visits, at), bad.front());
      }
      if (v.depth >= options.depth) {
        continue;
      }
      const auto moves = successors(v.state, ctx, v.prev, vp);
      if (moves.empty() && report.non_blocking.pass) {
        report.non_blocking =
            PropertyVerdict{false,
                            "car " + std::to_string(c + 1) + " has no admissible input at " +
                                location_name(v.state.position) + " with E = " +
                                std::to_string(v.state.energy),
                            c + 1, path_to(visits, at)};
      }
      if (moves.size() >= 2) {
        ++report.nondeterministic_states;
      }
      for (const Move& m : moves) {
        const Key key = quanta.key(m.next, m.input);
        if (seen.contains(key)) {
          continue;
        }
        if (visits.size() >= options.max_states) {
          report.truncated = true;
          break;
        }
        seen.emplace(key, visits.size());
        visits.push_back({m.next, m.input, at, v.depth + 1});
        frontier.push_back(visits.size() - 1);
      }
    }
    report.states_explored += visits.size();
  }

  std::mt19937_64 rng(options.seed);
  for (std::size_t sample = 0; sample < options.samples; ++sample) {
    WorldContext ctx = problem.initial_context();
    TrajectorySet t;
    std::vector<DiscreteInput> prev;
    for (const auto& s : starts) {
      t.cars.push_back(CarTrajectory{{s.state}, {}});
      prev.push_back(s.previous);
    }
    bool stuck = false;
    for (std::size_t k = 0; k < options.depth && !stuck; ++k) {
      for (std::size_t c = 0; c < starts.size(); ++c) {
        const VehicleState s = t.cars[c].states.back();
        const auto moves = successors(s, ctx, prev[c], vp);
        if (moves.empty()) {
          if (report.non_blocking.pass) {
            report.non_blocking = PropertyVerdict{
                false, "car " + std::to_string(c + 1) + " blocked during a random rollout", c + 1,
                t.cars[c]};
          }
          stuck = true;
          break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
        const Move& m = moves[pick(rng)];
        ctx.commit(detail::resting_node(s, g), m.input);
        t.cars[c].states.push_back(m.next);
        t.cars[c].inputs.push_back(m.input);
        prev[c] = m.input;
        if (auto bad = domain_violations(m.next, g, vp); !bad.empty()) {
          domain_fail(c + 1, t.cars[c], bad.front());
        }
      }
      for (NodeId n = 1; n <= g.size() && report.capacity.pass; ++n) {
        if (ctx.occupancy[n - 1] > ctx.chargers(n)) {
          report.capacity = PropertyVerdict{
              false, "station " + std::to_string(n) + " over capacity at step " + std::to_string(k),
              0, {}};
        }
      }
      ctx.next_step();
    }
    ++report.samples_run;
  }
  if (report.non_blocking.pass) {
    report.non_blocking.detail = "every explored state admits an input";
  }
  if (report.domain_preserving.pass) {
    report.domain_preserving.detail = "every explored state lies in the domain";
  }
  if (report.capacity.pass) {
    report.capacity.detail = "station occupancy never exceeded the free chargers";
  }
  return report;
}

}  // namespace chargenet

#endif
