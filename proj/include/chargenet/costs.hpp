#ifndef CHARGENET_COSTS_HPP
#define CHARGENET_COSTS_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/network.hpp"
#include "chargenet/traffic.hpp"
#include "chargenet/vehicle.hpp"

namespace chargenet {

/// AbsoluteDeviation charges C * |U - S/2| per station-step and is never
/// negative. Literal keeps the signed form C * |sgn(U/S - 1/2)| * (U - S),
/// with the sign term defined as 0 at U == S.
enum class StationCostVariant { AbsoluteDeviation, Literal };

inline const char* to_string(StationCostVariant v) {
  return v == StationCostVariant::Literal ? "literal" : "absolute-deviation";
}

struct CostWeights {
  double station_unit_cost = 0.0;
  double congestion_weight = 0.0;
  double charging_time_weight = 0.0;
  double waiting_time_weight = 0.0;
  StationCostVariant station_variant = StationCostVariant::AbsoluteDeviation;
  bool electricity_enabled = false;
  /// $/kWh, indexed [node - 1][step]. Steps past the last column reuse it.
  std::vector<std::vector<double>> electricity_price;

  [[nodiscard]] double price(NodeId n, std::size_t k) const {
    const auto& row = electricity_price.at(n - 1);
    if (row.empty()) {
      throw ConfigError("electricity price table has an empty row");
    }
    return row[std::min(k, row.size() - 1)];
  }

  [[nodiscard]] std::vector<std::string> violations(std::size_t nodes, std::size_t horizon) const {
    std::vector<std::string> out;
    for (double w : {station_unit_cost, congestion_weight, charging_time_weight,
                     waiting_time_weight}) {
      if (!(w >= 0.0)) {
        out.emplace_back("weights: all weights must be nonnegative");
        break;
      }
    }
    if (electricity_enabled) {
      bool shape_ok = electricity_price.size() == nodes;
      for (const auto& row : electricity_price) {
        shape_ok = shape_ok && row.size() == horizon;
        for (double p : row) {
          if (!(p >= 0.0)) {
            out.emplace_back("weights: electricity prices must be nonnegative");
            break;
          }
        }
      }
      if (!shape_ok) {
        out.emplace_back("weights: electricity price table must be N x horizon");
      }
    }
    return out;
  }
};

struct CostBreakdown {
  double station = 0.0;
  double electricity = 0.0;
  double congestion = 0.0;
  double charging_time = 0.0;
  double waiting_time = 0.0;
  double degradation = 0.0;
  double total = 0.0;

  void finalize() {
    total = station + electricity + congestion + charging_time + waiting_time + degradation;
  }

  CostBreakdown& operator+=(const CostBreakdown& o) {
    station += o.station;
    electricity += o.electricity;
    congestion += o.congestion;
    charging_time += o.charging_time;
    waiting_time += o.waiting_time;
    degradation += o.degradation;
    finalize();
    return *this;
  }

  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

/// v = number of cars driving on edge h at step k.
inline int edge_flow(const TrajectorySet& t, EdgeIndex h, std::size_t k) {
  int v = 0;
  for (const auto& car : t.cars) {
    if (k < car.inputs.size() && !car.inputs[k].gamma && car.inputs[k].edge == h) {
      ++v;
    }
  }
  return v;
}

/// U(k, n): cars charging at node n during step k, indexed [k][n - 1].
inline std::vector<std::vector<int>> station_occupancy(const TrajectorySet& t,
                                                       const HighwayGraph& graph) {
  std::vector<std::vector<int>> u(t.horizon(), std::vector<int>(graph.size(), 0));
  for (const auto& car : t.cars) {
    for (std::size_t k = 0; k < car.inputs.size(); ++k) {
      if (car.inputs[k].gamma && car.inputs[k].charge) {
        const NodeId n = detail::resting_node(car.states[k], graph);
        ++u[k][n - 1];
      }
    }
  }
  return u;
}

/// Contribution of one station during one step.
inline double station_term(int occupancy, double preferred, double unit_cost,
                           StationCostVariant variant) {
  const double u = occupancy;
  if (preferred == 0.0) {
    if (occupancy != 0) {
      throw DomainError("station_cost: nonzero utilization at a station with S_n = 0");
    }
    return 0.0;
  }
  if (variant == StationCostVariant::AbsoluteDeviation) {
    return unit_cost * std::abs(u - 0.5 * preferred);
  }
  double sign = 0.0;
  if (u == preferred) {
    sign = 0.0;
  } else if (u > 0.5 * preferred) {
    sign = 1.0;
  } else if (u < 0.5 * preferred) {
    sign = -1.0;
  }
  return unit_cost * std::abs(sign) * (u - preferred);
}

inline double station_cost(const std::vector<std::vector<int>>& occupancy,
                           const HighwayGraph& graph, const CostWeights& weights,
                           StationCostVariant variant) {
  double total = 0.0;
  for (const auto& step : occupancy) {
    for (NodeId n = 1; n <= graph.size(); ++n) {
      total += station_term(step[n - 1], graph.station(n).preferred_capacity,
                            weights.station_unit_cost, variant);
    }
  }
  return total;
}

inline double station_cost(const std::vector<std::vector<int>>& occupancy,
                           const HighwayGraph& graph, const CostWeights& weights) {
  return station_cost(occupancy, graph, weights, weights.station_variant);
}

/// Sum of price(k, n) * delta E over charging steps; 0 when disabled.
/// step_offset shifts the price lookup for trajectories that start mid-run.
inline double electricity_cost(const TrajectorySet& t, const HighwayGraph& graph,
                               const CostWeights& weights, std::size_t step_offset = 0) {
  if (!weights.electricity_enabled) {
    return 0.0;
  }
  if (weights.electricity_price.size() != graph.size()) {
    throw ConfigError("electricity enabled without an N-row price table");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < t.horizon(); ++k) {
    for (NodeId n = 1; n <= graph.size(); ++n) {
      for (const auto& car : t.cars) {
        const auto& u = car.inputs[k];
        if (u.gamma && u.charge && detail::resting_node(car.states[k], graph) == n) {
          total += weights.price(n, k + step_offset) *
                   (car.states[k + 1].energy - car.states[k].energy);
        }
      }
    }
  }
  return total;
}

struct CustomerTimeCosts {
  double charging_time = 0.0;
  double waiting_time = 0.0;
  double congestion = 0.0;
};

/// Quadratic penalties: per-car squared charging and waiting step counts, and
/// squared per-edge flows summed over steps.
inline CustomerTimeCosts customer_time_costs(const TrajectorySet& t, const HighwayGraph& graph,
                                             const CostWeights& weights) {
  CustomerTimeCosts out;
  for (const auto& car : t.cars) {
    double charging = 0.0;
    double waiting = 0.0;
    for (const auto& u : car.inputs) {
      const Mode m = mode_select(u);
      charging += m == Mode::Charging ? 1.0 : 0.0;
      waiting += m == Mode::Waiting ? 1.0 : 0.0;
    }
    out.charging_time += weights.charging_time_weight * charging * charging;
    out.waiting_time += weights.waiting_time_weight * waiting * waiting;
  }
  const std::size_t n = graph.size();
  for (std::size_t k = 0; k < t.horizon(); ++k) {
    std::vector<int> flow(n * n, 0);
    for (const auto& car : t.cars) {
      if (!car.inputs[k].gamma) {
        ++flow[car.inputs[k].edge.value - 1];
      }
    }
    for (int v : flow) {
      out.congestion += weights.congestion_weight * static_cast<double>(v) * v;
    }
  }
  return out;
}

/// A maximal run of consecutive charging steps for one car.
struct ChargingSession {
  std::size_t car = 0;  // 0-based
  std::size_t first_step = 0;
  std::size_t steps = 0;
  double energy_gain = 0.0;  // kWh

  [[nodiscard]] double minutes(double t_s) const { return static_cast<double>(steps) * t_s; }
  [[nodiscard]] double mean_power(double t_s) const {
    return steps == 0 ? 0.0 : energy_gain / (minutes(t_s) / 60.0);
  }
};

inline std::vector<ChargingSession> charging_sessions(const TrajectorySet& t) {
  std::vector<ChargingSession> out;
  for (std::size_t c = 0; c < t.cars.size(); ++c) {
    const auto& car = t.cars[c];
    std::size_t k = 0;
    while (k < car.inputs.size()) {
      if (mode_select(car.inputs[k]) != Mode::Charging) {
        ++k;
        continue;
      }
      const std::size_t start = k;
      while (k < car.inputs.size() && mode_select(car.inputs[k]) == Mode::Charging) {
        ++k;
      }
      out.push_back(ChargingSession{c, start, k - start,
                                    car.states[k].energy - car.states[start].energy});
    }
  }
  return out;
}

inline double session_degradation(const ChargingSession& s, const BatteryParams& bp,
                                  double t_s) {
  return degradation_cost(std::max(0.0, s.mean_power(t_s)), s.minutes(t_s), bp);
}

inline CostBreakdown total_cost(const TrajectorySet& t, const HighwayGraph& graph,
                                const CostWeights& weights, const BatteryParams& battery,
                                double t_s, std::size_t step_offset = 0) {
  CostBreakdown out;
  out.station = station_cost(station_occupancy(t, graph), graph, weights);
  out.electricity = electricity_cost(t, graph, weights, step_offset);
  const CustomerTimeCosts customer = customer_time_costs(t, graph, weights);
  out.congestion = customer.congestion;
  out.charging_time = customer.charging_time;
  out.waiting_time = customer.waiting_time;
  for (const auto& s : charging_sessions(t)) {
    out.degradation += session_degradation(s, battery, t_s);
  }
  out.finalize();
  return out;
}

/// Per-step marginal contributions; summing the rows reproduces total_cost up
/// to rounding. Quadratic per-car terms are attributed as increments
/// w * (2 * count + 1), degradation at the step that closes a session.
inline std::vector<CostBreakdown> cost_trace(const TrajectorySet& t, const HighwayGraph& graph,
                                             const CostWeights& weights,
                                             const BatteryParams& battery, double t_s,
                                             std::size_t step_offset = 0) {
  const std::size_t horizon = t.horizon();
  std::vector<CostBreakdown> rows(horizon);
  const auto occupancy = station_occupancy(t, graph);
  for (std::size_t k = 0; k < horizon; ++k) {
    for (NodeId n = 1; n <= graph.size(); ++n) {
      rows[k].station += station_term(occupancy[k][n - 1], graph.station(n).preferred_capacity,
                                      weights.station_unit_cost, weights.station_variant);
    }
    TrajectorySet one;
    for (const auto& car : t.cars) {
      one.cars.push_back(CarTrajectory{{car.states[k], car.states[k + 1]}, {car.inputs[k]}});
    }
    rows[k].electricity = electricity_cost(one, graph, weights, step_offset + k);
    rows[k].congestion = customer_time_costs(one, graph, weights).congestion;
  }
  for (const auto& car : t.cars) {
    double charging = 0.0;
    double waiting = 0.0;
    for (std::size_t k = 0; k < car.inputs.size(); ++k) {
      const Mode m = mode_select(car.inputs[k]);
      if (m == Mode::Charging) {
        rows[k].charging_time += weights.charging_time_weight * (2.0 * charging + 1.0);
        charging += 1.0;
      } else if (m == Mode::Waiting) {
        rows[k].waiting_time += weights.waiting_time_weight * (2.0 * waiting + 1.0);
        waiting += 1.0;
      }
    }
  }
  for (const auto& s : charging_sessions(t)) {
    rows[s.first_step + s.steps - 1].degradation += session_degradation(s, battery, t_s);
  }
  for (auto& r : rows) {
    r.finalize();
  }
  return rows;
}

}  // namespace chargenet

#endif
