#ifndef CHARGENET_TESTS_SUPPORT_HPP
#define CHARGENET_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <string>

#include "chargenet/oracle.hpp"
#include "chargenet/problem.hpp"
#include "chargenet/scenario.hpp"

namespace chargenet::testing {

inline std::string scenario_path(const std::string& name) {
  return std::string(CHARGENET_SCENARIO_DIR) + "/" + name;
}

inline ScheduleProblem fixture(const std::string& name) {
  return load_scenario(scenario_path(name + ".json"));
}

/// Fine-step forward Euler integration of dE/dt = P(E), in minutes. The last
/// step is shortened so the level lands exactly on e_f.
inline double euler_charging_minutes(double e_i, double e_f, const BatteryParams& bp,
                                     double dt_minutes) {
  double e = e_i;
  double t = 0.0;
  while (e < e_f) {
    const double p = charge_power(e, bp);
    const double de = p * dt_minutes / 60.0;
    if (e + de >= e_f) {
      return t + (e_f - e) / p * 60.0;
    }
    e += de;
    t += dt_minutes;
  }
  return t;
}

struct RandomProblemLimits {
  std::size_t max_nodes = 4;
  std::size_t max_cars = 2;
  std::size_t max_horizon = 7;
  double max_search_bound = 2e6;
};

/// Small problem with random topology, stations, energies and weights. Every
/// draw passes validate() and fits under the oracle limit.
inline ScheduleProblem random_problem(std::mt19937_64& rng, const RandomProblemLimits& lim = {}) {
  auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto real = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  while (true) {
    const std::size_t n = pick(2, lim.max_nodes);
    const std::size_t cars = pick(1, lim.max_cars);
    const std::size_t horizon = pick(2, lim.max_horizon);
    ScheduleProblem p;
    p.graph = HighwayGraph(n);
    for (NodeId i = 1; i <= n; ++i) {
      p.graph.set_station(i, static_cast<int>(pick(0, 2)));
    }
    const double lengths[] = {5.0, 10.0, 15.0, 20.0};
    for (NodeId i = 1; i < n; ++i) {
      const double miles = lengths[pick(0, 3)];
      p.graph.add_road(i, i + 1, miles, miles, 2.0);
    }
    for (NodeId i = 1; i + 2 <= n; ++i) {
      if (real(0.0, 1.0) < 0.3) {
        const double miles = lengths[pick(0, 3)];
        p.graph.add_road(i, i + 2, miles, miles, 2.0);
      }
    }
    p.vehicle.battery = BatteryParams(2.0, 12.0, 10.0, 30.0, 1.5, 1e-4, 1e-3, 1e-2);
    auto& mp = p.vehicle.motion;
    mp.base_speed = 10.0;
    mp.t_s = 10.0;
    mp.drive_power = 18.0;
    mp.congestion_coupling = real(0.0, 1.0) < 0.25;
    mp.d_max = longest_simple_path(p.graph).value_or(0.0) + 25.0;
    for (std::size_t c = 0; c < cars; ++c) {
      const auto start = static_cast<NodeId>(pick(1, n));
      const auto goal = static_cast<NodeId>(pick(1, n));
      p.cars.push_back(CarRequest{start, goal, 0.5 * static_cast<double>(pick(8, 24))});
    }
    p.horizon = horizon;
    auto& w = p.weights;
    w.station_unit_cost = real(0.0, 1.0);
    w.congestion_weight = real(0.1, 1.0);
    w.charging_time_weight = real(0.1, 1.0);
    w.waiting_time_weight = real(0.1, 1.0);
    if (real(0.0, 1.0) < 0.2) {
      w.station_variant = StationCostVariant::Literal;
    }
    if (real(0.0, 1.0) < 0.3) {
      w.electricity_enabled = true;
      w.electricity_price.assign(n, std::vector<double>(horizon, 0.0));
      for (auto& row : w.electricity_price) {
        for (auto& price : row) {
          price = real(0.0, 0.5);
        }
      }
    }
    if (oracle_search_bound(p) <= lim.max_search_bound && p.violations().empty()) {
      return p;
    }
  }
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace chargenet::testing

#endif
