#ifndef CHARGENET_MILP_HPP
#define CHARGENET_MILP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chargenet/automaton.hpp"
#include "chargenet/costs.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/problem.hpp"

namespace chargenet {

enum class VarKind { Binary, Continuous };
enum class Sense { LE, GE, EQ };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

/// coef * x_a * x_b; a == b for squares.
struct QuadTerm {
  std::size_t a = 0;
  std::size_t b = 0;
  double coef = 0.0;
};

class MilpModel {
public:
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<LinearTerm> objective_linear;
  std::vector<QuadTerm> objective_quadratic;
  double objective_constant = 0.0;

  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper) {
    if (lower > upper) {
      throw ArgumentError("milp: empty bounds for " + name);
    }
    if (index_.contains(name)) {
      throw ArgumentError("milp: duplicate variable " + name);
    }
    index_.emplace(name, variables.size());
    variables.push_back(Variable{std::move(name), kind, lower, upper});
    return variables.size() - 1;
  }

  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  [[nodiscard]] std::size_t at(const std::string& name) const {
    if (auto i = find(name)) {
      return *i;
    }
    throw ArgumentError("milp: no variable " + name);
  }

  [[nodiscard]] std::size_t binary_count() const {
    return static_cast<std::size_t>(std::count_if(
        variables.begin(), variables.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
  }

private:
  std::unordered_map<std::string, std::size_t> index_;
};

/// Affine expression over model variables.
struct LinExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinExpr var(std::size_t v, double coef = 1.0) {
    LinExpr e;
    e.terms.push_back({v, coef});
    return e;
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& t : o.terms) {
      add(t.var, t.coef);
    }
    constant += o.constant;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) { return *this += o * -1.0; }
  LinExpr operator*(double s) const {
    LinExpr e = *this;
    for (auto& t : e.terms) {
      t.coef *= s;
    }
    e.constant *= s;
    return e;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }

  void add(std::size_t v, double coef) {
    for (auto& t : terms) {
      if (t.var == v) {
        t.coef += coef;
        return;
      }
    }
    terms.push_back({v, coef});
  }
};

/// Margin that makes the "still on the edge" guard strict.
inline constexpr double kStrictMargin = 1e-6;

namespace milp_detail {

inline std::string name(const char* var, std::size_t car, std::size_t step) {
  return std::string(var) + "_c" + std::to_string(car) + "_k" + std::to_string(step);
}

inline std::string name(const char* var, std::size_t car, std::size_t step, std::size_t index) {
  return name(var, car, step) + "_h" + std::to_string(index);
}

struct Builder {
  MilpModel& m;

  void row(std::string label, const LinExpr& e, Sense s, double rhs) {
    Constraint c{std::move(label), {}, s, rhs - e.constant};
    for (const auto& t : e.terms) {
      if (t.coef != 0.0) {
        c.terms.push_back(t);
      }
    }
    m.constraints.push_back(std::move(c));
  }

  /// When the 0/1 expression `on` equals 1, enforce expr <= 0 (upper) and/or
  /// expr >= 0 (lower). [lo, hi] is the range of expr over the variable box.
  void implies(const std::string& label, const LinExpr& on, const LinExpr& expr, double lo,
               double hi, bool upper, bool lower) {
    if (upper) {
      const double big = std::max(hi, 0.0);
      row(label + "_ub", expr + on * big, Sense::LE, big);
    }
    if (lower) {
      const double small = std::min(lo, 0.0);
      row(label + "_lb", expr + on * small, Sense::GE, small);
    }
  }

  void implies_eq(const std::string& label, const LinExpr& on, const LinExpr& expr, double lo,
                  double hi) {
    implies(label, on, expr, lo, hi, true, true);
  }

  /// Range of an expression whose terms are independent box variables.
  [[nodiscard]] std::pair<double, double> range(const LinExpr& e) const {
    double lo = e.constant;
    double hi = e.constant;
    for (const auto& t : e.terms) {
      const auto& v = m.variables[t.var];
      lo += std::min(t.coef * v.lower, t.coef * v.upper);
      hi += std::max(t.coef * v.lower, t.coef * v.upper);
    }
    return {lo, hi};
  }

  void implies_eq(const std::string& label, const LinExpr& on, const LinExpr& expr) {
    const auto [lo, hi] = range(expr);
    implies_eq(label, on, expr, lo, hi);
  }
};

}  // namespace milp_detail

/// Big-M encoding of a scheduling problem. Binaries per car-step: gamma, y,
/// the N^2 edge selector, three mode flags and two event flags. Charging is
/// bounded by the concave charge envelope, so the knee needs no binary.
/// Battery wear is not part of the exported objective.
inline MilpModel encode_bigm(const ScheduleProblem& problem) {
  problem.validate();
  const auto& mp = problem.vehicle.motion;
  const auto& bp = problem.vehicle.battery;
  const auto& w = problem.weights;
  if (mp.congestion_coupling) {
    throw ArgumentError("encode_bigm: congestion-coupled velocity is not linear");
  }
  if (w.station_variant != StationCostVariant::AbsoluteDeviation) {
    throw ArgumentError("encode_bigm: only the absolute-deviation station cost is linear");
  }
  using milp_detail::name;
  const HighwayGraph& g = problem.graph;
  const std::size_t n = g.size();
  const std::size_t nn = n * n;
  const std::size_t horizon = problem.horizon;
  const std::size_t cars = problem.cars.size();
  const double speed = mp.base_speed;
  const double tau = mp.t_s / 60.0;
  const double drive_energy = kwh(mp.drive_power_at(speed), mp.t_s);
  const double l_max = g.max_edge_length();
  const double e_span = bp.e_max() - bp.e_min();
  const WorldContext ctx0 = problem.initial_context();
  const auto starts = problem.initial_starts();

  MilpModel model;
  milp_detail::Builder b{model};

  auto target = [&](std::size_t h) { return decode_edge(EdgeIndex{h}, n).second; };
  auto is_arc = [&](std::size_t h) {
    const auto [i, j] = decode_edge(EdgeIndex{h}, n);
    return i != j && g.has_arc(i, j);
  };

  // Network-level station deviation variables come first (car 0).
  std::vector<std::vector<std::size_t>> st(horizon, std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < horizon; ++k) {
    for (NodeId node = 1; node <= n; ++node) {
      const double pref = g.station(node).preferred_capacity;
      const double top = std::max(0.5 * pref, std::max(0, ctx0.chargers(node)) - 0.5 * pref);
      st[k][node - 1] = model.add_variable(name("st", 0, k, node), VarKind::Continuous, 0.0, top);
    }
  }

  struct StepVars {
    std::size_t gamma, y;
    std::vector<std::size_t> xi;
    std::size_t beta[3];
    std::size_t de[2];
    std::vector<std::size_t> u;  // per node
    std::vector<std::size_t> r;  // per edge index, only arcs are used
    std::vector<std::size_t> q;  // per node, electricity only
  };
  struct StateVars {
    std::size_t energy, distance, progress;
  };
  std::vector<std::vector<StepVars>> sv(cars, std::vector<StepVars>(horizon));
  std::vector<std::vector<StateVars>> xv(cars, std::vector<StateVars>(horizon + 1));

  for (std::size_t c = 0; c < cars; ++c) {
    const std::size_t id = c + 1;
    for (std::size_t k = 0; k <= horizon; ++k) {
      if (k < horizon) {
        StepVars& s = sv[c][k];
        s.gamma = model.add_variable(name("gamma", id, k), VarKind::Binary, 0, 1);
        s.y = model.add_variable(name("y", id, k), VarKind::Binary, 0, 1);
        for (std::size_t h = 1; h <= nn; ++h) {
          s.xi.push_back(model.add_variable(name("xi", id, k, h), VarKind::Binary, 0, 1));
        }
        for (std::size_t i = 0; i < 3; ++i) {
          s.beta[i] = model.add_variable(name("beta", id, k, i + 1), VarKind::Binary, 0, 1);
        }
        for (std::size_t i = 0; i < 2; ++i) {
          s.de[i] = model.add_variable(name("de", id, k, i + 1), VarKind::Binary, 0, 1);
        }
      }
      StateVars& x = xv[c][k];
      x.energy = model.add_variable(name("E", id, k), VarKind::Continuous, bp.e_min(), bp.e_max());
      x.distance = model.add_variable(name("d", id, k), VarKind::Continuous, 0.0, mp.d_max);
      x.progress = model.add_variable(name("eps", id, k), VarKind::Continuous, 0.0, l_max);
      if (k < horizon) {
        StepVars& s = sv[c][k];
        for (NodeId node = 1; node <= n; ++node) {
          s.u.push_back(model.add_variable(name("u", id, k, node), VarKind::Continuous, 0, 1));
        }
        s.r.assign(nn, 0);
        for (std::size_t h = 1; h <= nn; ++h) {
          if (is_arc(h)) {
            s.r[h - 1] = model.add_variable(name("r", id, k, h), VarKind::Continuous, 0, 1);
          }
        }
        if (w.electricity_enabled) {
          for (NodeId node = 1; node <= n; ++node) {
            s.q.push_back(model.add_variable(name("q", id, k, node), VarKind::Continuous, 0.0,
                                             kwh(bp.p_max(), mp.t_s)));
          }
        }
      }
    }
  }

  using V = LinExpr;
  for (std::size_t c = 0; c < cars; ++c) {
    const std::size_t id = c + 1;
    const CarStart& start = starts[c];
    // Initial conditions.
    b.row(name("init_E", id, 0), V::var(xv[c][0].energy), Sense::EQ, start.state.energy);
    b.row(name("init_d", id, 0), V::var(xv[c][0].distance), Sense::EQ, start.state.trip_distance);
    b.row(name("init_eps", id, 0), V::var(xv[c][0].progress), Sense::EQ,
          start.state.edge_progress);
    const bool start_mid = !start.state.position.at_node();
    const std::size_t start_edge = start_mid ? edge_index(start.state.position.from,
                                                          start.state.position.to, n).value
                                             : start.previous.edge.value;

    for (std::size_t k = 0; k < horizon; ++k) {
      const StepVars& s = sv[c][k];
      const StateVars& x = xv[c][k];
      const StateVars& x1 = xv[c][k + 1];
      auto tag = [&](const char* what) { return name(what, id, k); };

      // Previous-step selector and "still on an edge" flag; constants at k = 0.
      auto prev_xi = [&](std::size_t h) -> V {
        if (k == 0) {
          return V(h == start_edge ? 1.0 : 0.0);
        }
        return V::var(sv[c][k - 1].xi[h - 1]);
      };
      const V prev_mid = k == 0 ? V(start_mid ? 1.0 : 0.0) : V::var(sv[c][k - 1].de[1]);
      const V gamma = V::var(s.gamma);
      const V depart = V(1.0) - gamma - prev_mid;

      V onehot;
      V length;
      for (std::size_t h = 1; h <= nn; ++h) {
        onehot += V::var(s.xi[h - 1]);
        if (is_arc(h)) {
          const auto [i, j] = decode_edge(EdgeIndex{h}, n);
          length += V::var(s.xi[h - 1], g.length(i, j));
        }
      }
      b.row(tag("onehot"), onehot, Sense::EQ, 1.0);
      b.row(tag("charge_at_node"), V::var(s.y) - gamma, Sense::LE, 0.0);
      b.row(tag("mode_wait"), V::var(s.beta[0]) - gamma + V::var(s.y), Sense::EQ, 0.0);
      b.row(tag("mode_charge"), V::var(s.beta[1]) - V::var(s.y), Sense::EQ, 0.0);
      b.row(tag("mode_drive"), V::var(s.beta[2]) + gamma, Sense::EQ, 1.0);
      b.row(tag("mode_onehot"), V::var(s.beta[0]) + V::var(s.beta[1]) + V::var(s.beta[2]),
            Sense::EQ, 1.0);
      b.row(tag("mid_edge_drives"), gamma + prev_mid, Sense::LE, 1.0);
      b.row(tag("events"), V::var(s.de[0]) + V::var(s.de[1]) + gamma, Sense::EQ, 1.0);

      // The selector only changes on departure, and only to an arc leaving
      // the node the car is at (the target of the previous selection).
      for (std::size_t h = 1; h <= nn; ++h) {
        const V cur = V::var(s.xi[h - 1]);
        const std::string hs = "_h" + std::to_string(h);
        b.row(tag("keep") + hs + "_a", cur - prev_xi(h) - depart, Sense::LE, 0.0);
        b.row(tag("keep") + hs + "_b", prev_xi(h) - cur - depart, Sense::LE, 0.0);
        if (!is_arc(h)) {
          b.row(tag("arc") + hs, cur + depart, Sense::LE, 1.0);
        } else {
          const NodeId from = decode_edge(EdgeIndex{h}, n).first;
          V here;
          for (std::size_t h2 = 1; h2 <= nn; ++h2) {
            if (target(h2) == from) {
              here += prev_xi(h2);
            }
          }
          b.row(tag("source") + hs, cur + depart - here, Sense::LE, 1.0);
        }
      }

      // Event guards: arrival iff progress + speed reaches the edge length.
      const V reach = V::var(x.progress) + V(speed) - length;
      b.implies(tag("arrive"), V::var(s.de[0]), reach, speed - l_max, l_max + speed, false, true);
      b.implies(tag("moving"), V::var(s.de[1]), reach + V(kStrictMargin), speed - l_max,
                l_max + speed + kStrictMargin, true, false);

      // Edge progress: advances while moving, zero otherwise.
      const V eps_next = V::var(x1.progress);
      b.implies_eq(tag("eps_move"), V::var(s.de[1]), eps_next - V::var(x.progress) - V(speed));
      b.row(tag("eps_rest_ub"), eps_next - V::var(s.de[1], l_max), Sense::LE, 0.0);

      // Trip distance.
      const V d_step = V::var(x1.distance) - V::var(x.distance);
      b.implies_eq(tag("d_move"), V::var(s.de[1]), d_step - V(speed));
      b.implies_eq(tag("d_arrive"), V::var(s.de[0]), d_step - length + V::var(x.progress),
                   -mp.d_max - l_max, mp.d_max + l_max);
      b.implies_eq(tag("d_rest"), gamma, d_step);

      // Energy.
      const V e_step = V::var(x1.energy) - V::var(x.energy);
      b.implies_eq(tag("E_drive"), V::var(s.beta[2]), e_step + V(drive_energy));
      b.implies_eq(tag("E_wait"), V::var(s.beta[0]), e_step);
      {
        const V on = V::var(s.beta[1]);
        const V flat = e_step - V(kwh(bp.p_max(), mp.t_s));
        const V taper =
            V::var(x1.energy) - V::var(x.energy, 1.0 - bp.chg_n() * tau) - V(bp.chg_m() * tau);
        const auto [flo, fhi] = b.range(flat);
        const auto [tlo, thi] = b.range(taper);
        const auto [slo, shi] = b.range(e_step);
        b.implies(tag("E_charge_flat"), on, flat, flo, fhi, true, false);
        b.implies(tag("E_charge_taper"), on, taper, tlo, thi, true, false);
        b.implies(tag("E_charge_gain"), on, e_step, slo, shi, false, true);
      }

      // Charging at node: y AND selector pointing at the node.
      for (NodeId node = 1; node <= n; ++node) {
        V at;
        for (std::size_t h = 1; h <= nn; ++h) {
          if (target(h) == node) {
            at += V::var(s.xi[h - 1]);
          }
        }
        const V u = V::var(s.u[node - 1]);
        const std::string ns = "_h" + std::to_string(node);
        b.row(tag("u_y") + ns, u - V::var(s.y), Sense::LE, 0.0);
        b.row(tag("u_at") + ns, u - at, Sense::LE, 0.0);
        b.row(tag("u_and") + ns, u - V::var(s.y) - at, Sense::GE, -1.0);
        if (w.electricity_enabled) {
          const V q = V::var(s.q[node - 1]);
          b.row(tag("q_on") + ns, q - u * kwh(bp.p_max(), mp.t_s), Sense::LE, 0.0);
          b.row(tag("q_ub") + ns, q - e_step + u * e_span, Sense::LE, e_span);
          b.row(tag("q_lb") + ns, q - e_step - u * e_span, Sense::GE, -e_span);
        }
      }
      for (std::size_t h = 1; h <= nn; ++h) {
        if (!is_arc(h)) {
          continue;
        }
        const V r = V::var(s.r[h - 1]);
        const V xi = V::var(s.xi[h - 1]);
        const std::string hs = "_h" + std::to_string(h);
        b.row(tag("r_drive") + hs, r + gamma, Sense::LE, 1.0);
        b.row(tag("r_xi") + hs, r - xi, Sense::LE, 0.0);
        b.row(tag("r_and") + hs, r - xi + gamma, Sense::GE, 0.0);
      }
    }

    if (problem.terminal_required) {
      const std::size_t last = horizon - 1;
      V at_goal;
      for (std::size_t h = 1; h <= nn; ++h) {
        if (target(h) == problem.cars[c].goal) {
          at_goal += V::var(sv[c][last].xi[h - 1]);
        }
      }
      b.row(name("goal", id, horizon), at_goal, Sense::EQ, 1.0);
      b.row(name("goal_parked", id, horizon), V::var(sv[c][last].de[1]), Sense::EQ, 0.0);
      b.row(name("goal_eps", id, horizon), V::var(xv[c][horizon].progress), Sense::EQ, 0.0);
    }
  }

  // Station capacity, the one-step wait for newcomers, and the deviation cost.
  for (std::size_t k = 0; k < horizon; ++k) {
    for (NodeId node = 1; node <= n; ++node) {
      const double chargers = ctx0.chargers(node);
      const std::string ns = "_h" + std::to_string(node);
      V occupancy;
      V prev_occupancy;
      for (std::size_t c = 0; c < cars; ++c) {
        occupancy += V::var(sv[c][k].u[node - 1]);
        prev_occupancy += k == 0 ? V() : V::var(sv[c][k - 1].u[node - 1]);
      }
      if (k == 0) {
        prev_occupancy = V(ctx0.previous_occupancy[node - 1]);
      }
      b.row(name("cap", 0, k) + ns, occupancy, Sense::LE, chargers);
      for (std::size_t c = 0; c < cars; ++c) {
        V was;
        if (k == 0) {
          const CarStart& s0 = starts[c];
          const bool charging = s0.previous.gamma && s0.previous.charge &&
                                s0.state.position.at_node() && s0.state.position.node() == node;
          was = V(charging ? 1.0 : 0.0);
        } else {
          was = V::var(sv[c][k - 1].u[node - 1]);
        }
        b.row(name("newcomer", c + 1, k) + ns,
              prev_occupancy + V::var(sv[c][k].u[node - 1]) - was, Sense::LE, chargers);
      }
      const double half = 0.5 * g.station(node).preferred_capacity;
      const V dev = V::var(st[k][node - 1]);
      b.row(name("st_over", 0, k) + ns, dev - occupancy, Sense::GE, -half);
      b.row(name("st_under", 0, k) + ns, dev + occupancy, Sense::GE, half);
      model.objective_linear.push_back({st[k][node - 1], w.station_unit_cost});
    }
  }

  // Objective: linear electricity, quadratic congestion and time penalties.
  for (std::size_t c = 0; c < cars; ++c) {
    for (std::size_t k = 0; k < horizon; ++k) {
      if (w.electricity_enabled) {
        for (NodeId node = 1; node <= n; ++node) {
          model.objective_linear.push_back(
              {sv[c][k].q[node - 1], w.price(node, k + problem.step_offset)});
        }
      }
    }
  }
  auto square_of_sum = [&](const std::vector<std::size_t>& vars, double weight) {
    if (weight == 0.0) {
      return;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      model.objective_quadratic.push_back({vars[i], vars[i], weight});
      for (std::size_t j = i + 1; j < vars.size(); ++j) {
        model.objective_quadratic.push_back({vars[i], vars[j], 2.0 * weight});
      }
    }
  };
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t h = 1; h <= nn; ++h) {
      if (!is_arc(h)) {
        continue;
      }
      std::vector<std::size_t> flow;
      for (std::size_t c = 0; c < cars; ++c) {
        flow.push_back(sv[c][k].r[h - 1]);
      }
      square_of_sum(flow, w.congestion_weight);
    }
  }
  for (std::size_t c = 0; c < cars; ++c) {
    std::vector<std::size_t> charging;
    std::vector<std::size_t> waiting;
    for (std::size_t k = 0; k < horizon; ++k) {
      charging.push_back(sv[c][k].y);
      waiting.push_back(sv[c][k].beta[0]);
    }
    square_of_sum(charging, w.charging_time_weight);
    square_of_sum(waiting, w.waiting_time_weight);
  }
  return model;
}

/// Values for every model variable implied by a simulated trajectory set.
inline std::vector<double> assignment_from_trajectories(const MilpModel& model,
                                                        const ScheduleProblem& problem,
                                                        const TrajectorySet& t) {
  using milp_detail::name;
  const HighwayGraph& g = problem.graph;
  const std::size_t n = g.size();
  const std::size_t horizon = problem.horizon;
  if (t.cars.size() != problem.cars.size() || t.horizon() != horizon) {
    throw ArgumentError("assignment_from_trajectories: trajectory shape does not match problem");
  }
  std::vector<double> x(model.variables.size(), 0.0);
  auto set = [&](const std::string& var, double value) { x[model.at(var)] = value; };
  const auto occupancy = station_occupancy(t, g);
  for (std::size_t k = 0; k < horizon; ++k) {
    for (NodeId node = 1; node <= n; ++node) {
      set(name("st", 0, k, node),
          std::abs(occupancy[k][node - 1] - 0.5 * g.station(node).preferred_capacity));
    }
  }
  for (std::size_t c = 0; c < t.cars.size(); ++c) {
    const std::size_t id = c + 1;
    const auto& car = t.cars[c];
    for (std::size_t k = 0; k <= horizon; ++k) {
      set(name("E", id, k), car.states[k].energy);
      set(name("d", id, k), car.states[k].trip_distance);
      set(name("eps", id, k), car.states[k].edge_progress);
      if (k == horizon) {
        break;
      }
      const DiscreteInput& u = car.inputs[k];
      const VehicleState& next = car.states[k + 1];
      const Mode mode = mode_select(u);
      set(name("gamma", id, k), u.gamma ? 1 : 0);
      set(name("y", id, k), u.charge ? 1 : 0);
      set(name("xi", id, k, u.edge.value), 1);
      set(name("beta", id, k, mode == Mode::Waiting ? 1 : mode == Mode::Charging ? 2 : 3), 1);
      if (!u.gamma) {
        set(name("de", id, k, next.position.at_node() ? 1 : 2), 1);
        set(name("r", id, k, u.edge.value), 1);
      }
      if (mode == Mode::Charging) {
        const NodeId node = detail::resting_node(car.states[k], g);
        set(name("u", id, k, node), 1);
        if (problem.weights.electricity_enabled) {
          set(name("q", id, k, node), next.energy - car.states[k].energy);
        }
      }
    }
  }
  return x;
}

struct RowViolation {
  std::string name;
  double slack = 0.0;  // negative when violated
};

/// Rows, bounds and integrality checks with the given tolerance.
inline std::vector<RowViolation> check_assignment(const MilpModel& model,
                                                  const std::vector<double>& x,
                                                  double tolerance = 1e-9) {
  if (x.size() != model.variables.size()) {
    throw ArgumentError("check_assignment: one value per variable required");
  }
  std::vector<RowViolation> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Variable& v = model.variables[i];
    const double slack = std::min(x[i] - v.lower, v.upper - x[i]);
    if (slack < -tolerance) {
      out.push_back({"bound " + v.name, slack});
    }
    if (v.kind == VarKind::Binary && std::abs(x[i] - std::round(x[i])) > tolerance) {
      out.push_back({"integrality " + v.name, -std::abs(x[i] - std::round(x[i]))});
    }
  }
  for (const Constraint& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) {
      lhs += t.coef * x[t.var];
    }
    double slack = 0.0;
    switch (c.sense) {
      case Sense::LE:
        slack = c.rhs - lhs;
        break;
      case Sense::GE:
        slack = lhs - c.rhs;
        break;
      case Sense::EQ:
        slack = -std::abs(lhs - c.rhs);
        break;
    }
    if (slack < -tolerance) {
      out.push_back({c.name, slack});
    }
  }
  return out;
}

inline double objective_value(const MilpModel& model, const std::vector<double>& x) {
  double total = model.objective_constant;
  for (const auto& t : model.objective_linear) {
    total += t.coef * x[t.var];
  }
  for (const auto& q : model.objective_quadratic) {
    total += q.coef * x[q.a] * x[q.b];
  }
  return total;
}

/// Reads the per-car inputs back out of an integral assignment.
inline Plan decode_inputs(const MilpModel& model, const ScheduleProblem& problem,
                          const std::vector<double>& x) {
  using milp_detail::name;
  const std::size_t nn = problem.graph.size() * problem.graph.size();
  Plan plan(problem.cars.size());
  for (std::size_t c = 0; c < problem.cars.size(); ++c) {
    for (std::size_t k = 0; k < problem.horizon; ++k) {
      DiscreteInput u;
      u.gamma = x[model.at(name("gamma", c + 1, k))] > 0.5;
      u.charge = x[model.at(name("y", c + 1, k))] > 0.5;
      std::size_t chosen = 0;
      for (std::size_t h = 1; h <= nn; ++h) {
        if (x[model.at(name("xi", c + 1, k, h))] > 0.5) {
          if (chosen != 0) {
            throw ArgumentError("decode_inputs: edge selector is not one-hot");
          }
          chosen = h;
        }
      }
      if (chosen == 0) {
        throw ArgumentError("decode_inputs: edge selector is empty");
      }
      u.edge = EdgeIndex{chosen};
      plan[c].push_back(u);
    }
  }
  return plan;
}

}  // namespace chargenet

#endif
