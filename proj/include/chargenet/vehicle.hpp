#ifndef CHARGENET_VEHICLE_HPP
#define CHARGENET_VEHICLE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chargenet/errors.hpp"
#include "chargenet/network.hpp"
#include "chargenet/traffic.hpp"

// Units: kWh, kW, minutes, miles. Power times a step of t_s minutes is
// converted to energy with a factor of 1/60.

namespace chargenet {

enum class Mode { Waiting, Charging, Driving };

inline const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Waiting:
      return "waiting";
    case Mode::Charging:
      return "charging";
    case Mode::Driving:
      return "driving";
  }
  return "?";
}

inline double kwh(double kw, double minutes) { return kw * minutes / 60.0; }

/// Battery model. The charge curve is flat at p_max below the knee and
/// falls affinely (chg_m - chg_n * E) above it; chg_m is derived so the two
/// pieces meet at the knee.
class BatteryParams {
public:
  BatteryParams() = default;

  BatteryParams(double e_min, double e_max, double e_knee, double p_max, double chg_n,
                double deg_a = 0.0, double deg_b = 0.0, double deg_c = 0.0)
      : e_min_(e_min),
        e_max_(e_max),
        e_knee_(e_knee),
        p_max_(p_max),
        chg_n_(chg_n),
        chg_m_(p_max + chg_n * e_knee),
        deg_a_(deg_a),
        deg_b_(deg_b),
        deg_c_(deg_c) {
    std::vector<std::string> bad;
    if (!(e_min >= 0.0 && e_min < e_knee && e_knee < e_max)) {
      bad.emplace_back("battery: require 0 <= e_min < e_knee < e_max");
    }
    if (!(p_max > 0.0)) {
      bad.emplace_back("battery: p_max must be positive");
    }
    if (!(chg_n > 0.0)) {
      bad.emplace_back("battery: chg_n must be positive");
    }
    if (bad.empty() && chg_m_ - chg_n * e_max < 0.0) {
      bad.emplace_back("battery: charge power negative at e_max (chg_m - chg_n * e_max < 0)");
    }
    if (!bad.empty()) {
      throw ValidationError(std::move(bad));
    }
  }

  /// Variant taking an explicit chg_m; it must agree with the knee continuity value.
  static BatteryParams with_offset(double e_min, double e_max, double e_knee, double p_max,
                                   double chg_m, double chg_n, double deg_a = 0.0,
                                   double deg_b = 0.0, double deg_c = 0.0) {
    BatteryParams bp(e_min, e_max, e_knee, p_max, chg_n, deg_a, deg_b, deg_c);
    if (std::abs(bp.chg_m_ - chg_m) > 1e-9 * std::max(1.0, std::abs(chg_m))) {
      throw ValidationError({"battery: chg_m - chg_n * e_knee must equal p_max"});
    }
    return bp;
  }

  [[nodiscard]] double e_min() const noexcept { return e_min_; }
  [[nodiscard]] double e_max() const noexcept { return e_max_; }
  [[nodiscard]] double e_knee() const noexcept { return e_knee_; }
  [[nodiscard]] double p_max() const noexcept { return p_max_; }
  [[nodiscard]] double chg_m() const noexcept { return chg_m_; }
  [[nodiscard]] double chg_n() const noexcept { return chg_n_; }
  [[nodiscard]] double deg_a() const noexcept { return deg_a_; }
  [[nodiscard]] double deg_b() const noexcept { return deg_b_; }
  [[nodiscard]] double deg_c() const noexcept { return deg_c_; }

private:
  double e_min_ = 0.0;
  double e_max_ = 1.0;
  double e_knee_ = 0.5;
  double p_max_ = 1.0;
  double chg_n_ = 1.0;
  double chg_m_ = 1.5;
  double deg_a_ = 0.0;
  double deg_b_ = 0.0;
  double deg_c_ = 0.0;
};

struct MotionParams {
  double base_speed = 1.0;   // miles per step at free flow
  double t_s = 1.0;          // minutes per step
  double d_max = 1.0;        // trip distance bound, miles
  double drive_power = 0.0;  // kW drawn while driving
  /// When set, drive power is kappa * (miles per step) instead of drive_power.
  std::optional<double> drive_power_per_speed;
  bool congestion_coupling = false;
  BprCurve bpr_curve = BprCurve::Linear;

  [[nodiscard]] double drive_power_at(double velocity) const {
    return drive_power_per_speed ? *drive_power_per_speed * velocity : drive_power;
  }

  [[nodiscard]] std::vector<std::string> violations(const HighwayGraph* graph = nullptr) const {
    std::vector<std::string> out;
    if (!(base_speed > 0.0)) {
      out.emplace_back("motion: base_speed must be positive");
    }
    if (!(t_s > 0.0)) {
      out.emplace_back("motion: t_s must be positive");
    }
    if (!(d_max > 0.0)) {
      out.emplace_back("motion: d_max must be positive");
    }
    if (!(drive_power >= 0.0)) {
      out.emplace_back("motion: drive_power must be nonnegative");
    }
    if (drive_power_per_speed && !(*drive_power_per_speed >= 0.0)) {
      out.emplace_back("motion: drive_power_per_speed must be nonnegative");
    }
    if (graph != nullptr) {
      if (const auto longest = longest_simple_path(*graph); longest && d_max < *longest) {
        out.emplace_back("motion: d_max shorter than the longest simple path");
      }
    }
    return out;
  }
};

/// Where a car is: parked at a node, or travelling along from -> to.
struct Position {
  NodeId from = 0;
  NodeId to = 0;  // 0 while parked

  static Position at(NodeId node) { return Position{node, 0}; }
  static Position edge(NodeId from, NodeId to) { return Position{from, to}; }

  [[nodiscard]] bool at_node() const noexcept { return to == 0; }
  [[nodiscard]] NodeId node() const noexcept { return from; }

  friend bool operator==(const Position&, const Position&) = default;
};

struct VehicleState {
  double energy = 0.0;
  double trip_distance = 0.0;
  double edge_progress = 0.0;
  Position position;
  Mode mode = Mode::Waiting;

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Invariant violations of a single vehicle state (empty when the state is in the domain).
inline std::vector<std::string> state_violations(const VehicleState& s, const HighwayGraph& graph,
                                                 const BatteryParams& bp, const MotionParams& mp) {
  std::vector<std::string> out;
  if (!(s.energy >= bp.e_min() && s.energy <= bp.e_max())) {
    out.emplace_back("energy outside [e_min, e_max]");
  }
  if (!(s.trip_distance >= 0.0 && s.trip_distance < mp.d_max)) {
    out.emplace_back("trip distance outside [0, d_max)");
  }
  if (!graph.valid_node(s.position.from)) {
    out.emplace_back("position references an unknown node");
    return out;
  }
  if (s.position.at_node()) {
    if (s.edge_progress != 0.0) {
      out.emplace_back("edge progress nonzero at a node");
    }
  } else {
    if (!graph.valid_node(s.position.to) || !graph.has_arc(s.position.from, s.position.to)) {
      out.emplace_back("position on a nonexistent edge");
      return out;
    }
    const double len = graph.length(s.position.from, s.position.to);
    if (!(s.edge_progress > 0.0 && s.edge_progress < len)) {
      out.emplace_back("edge progress outside (0, e^ij)");
    }
    if (s.mode != Mode::Driving) {
      out.emplace_back("on an edge but not driving");
    }
  }
  return out;
}

/// P(E): p_max below the knee, chg_m - chg_n * E above it.
inline double charge_power(double energy, const BatteryParams& bp) {
  if (!(energy >= bp.e_min() && energy <= bp.e_max())) {
    throw DomainError("charge_power: energy outside [e_min, e_max]");
  }
  if (energy < bp.e_knee()) {
    return bp.p_max();
  }
  return std::max(0.0, bp.chg_m() - bp.chg_n() * energy);
}

/// Minutes needed to charge from e_i to e_f along P(E).
inline double charging_time_closed_form(double e_i, double e_f, const BatteryParams& bp) {
  if (!(e_i >= bp.e_min() && e_f <= bp.e_max())) {
    throw DomainError("charging_time_closed_form: energies outside [e_min, e_max]");
  }
  if (e_f < e_i) {
    throw ArgumentError("charging_time_closed_form: e_f < e_i");
  }
  if (e_f == e_i) {
    return 0.0;
  }
  const double m = bp.chg_m();
  const double n = bp.chg_n();
  if (m - n * e_f <= 0.0) {
    throw DomainError("charging_time_closed_form: final level unreachable (zero charge power)");
  }
  double hours = 0.0;
  double from = e_i;
  if (e_i < bp.e_knee()) {
    const double flat_end = std::min(e_f, bp.e_knee());
    hours += (flat_end - e_i) / bp.p_max();
    from = bp.e_knee();
  }
  if (e_f > from) {
    hours += std::log((m - n * from) / (m - n * e_f)) / n;
  }
  return hours * 60.0;
}

/// Energy after one step in the given mode. Charging saturates at e_max;
/// a driving step that would fall below e_min throws DomainError.
inline double step_energy(const VehicleState& state, Mode mode, const BatteryParams& bp,
                          const MotionParams& mp, double drive_power) {
  if (!(drive_power >= 0.0)) {
    throw ArgumentError("step_energy: drive power must be nonnegative");
  }
  switch (mode) {
    case Mode::Charging:
      return std::min(bp.e_max(), state.energy + kwh(charge_power(state.energy, bp), mp.t_s));
    case Mode::Waiting:
      return state.energy;
    case Mode::Driving: {
      const double next = state.energy - kwh(drive_power, mp.t_s);
      if (next < bp.e_min()) {
        throw DomainError("step_energy: driving step would strand the vehicle below e_min");
      }
      return next;
    }
  }
  return state.energy;
}

/// Battery wear for one charging session: (a P^2 + b P + c) * t.
inline double degradation_cost(double mean_power, double mean_time, const BatteryParams& bp) {
  if (!(mean_power >= 0.0) || !(mean_time >= 0.0)) {
    throw ArgumentError("degradation_cost: mean power and mean time must be nonnegative");
  }
  return (bp.deg_a() * mean_power * mean_power + bp.deg_b() * mean_power + bp.deg_c()) * mean_time;
}

/// Miles covered per step on i -> j. Constant unless congestion coupling is on,
/// in which case it is e^ij / t(flow) * t_s.
inline double incremental_velocity(const HighwayGraph& graph, NodeId i, NodeId j, double flow,
                                   const MotionParams& mp) {
  const auto& arc = graph.arc(i, j);
  if (!arc) {
    throw ArgumentError("incremental_velocity: no edge " + std::to_string(i) + "->" +
                        std::to_string(j));
  }
  if (!(flow >= 0.0)) {
    throw ArgumentError("incremental_velocity: flow must be nonnegative");
  }
  if (!mp.congestion_coupling) {
    return mp.base_speed;
  }
  return arc->miles / bpr_travel_time(graph, i, j, flow, mp.bpr_curve) * mp.t_s;
}

}  // namespace chargenet

#endif
