#ifndef CHARGENET_SCENARIO_HPP
#define CHARGENET_SCENARIO_HPP

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chargenet/errors.hpp"
#include "chargenet/network.hpp"
#include "chargenet/problem.hpp"

// Scenario files are JSON objects with the top-level keys nodes, edges,
// battery, vehicles, horizon and weights. Unknown keys anywhere are rejected.

namespace chargenet {

namespace scenario_detail {

using nlohmann::json;

inline void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) {
    throw ParseError(where, "expected an object");
  }
}

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; })) {
      throw ParseError(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

inline const json& field(const json& j, const std::string& where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(where.empty() ? key : where + "." + key, "missing required field");
  }
  return *it;
}

inline double number(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number()) {
    throw ParseError(where + "." + key, "expected a number");
  }
  return v.get<double>();
}

inline long long integer(const json& j, const std::string& where, const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_number_integer()) {
    throw ParseError(where + "." + key, "expected an integer");
  }
  return v.get<long long>();
}

inline bool flag(const json& j, const std::string& where, const char* key, bool fallback) {
  const auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (!it->is_boolean()) {
    throw ParseError(where + "." + key, "expected true or false");
  }
  return it->get<bool>();
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    line += static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError("line " + std::to_string(line), e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void check_top_level(const json& doc) {
  only_keys(doc, "", {"nodes", "edges", "vehicles", "battery", "horizon", "weights"});
}

inline HighwayGraph parse_graph(const json& doc) {
  const json& nodes = field(doc, "", "nodes");
  if (!nodes.is_array() || nodes.empty()) {
    throw ParseError("nodes", "expected a non-empty list");
  }
  const std::size_t n = nodes.size();
  HighwayGraph graph(n);
  std::set<long long> seen;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::string where = "nodes[" + std::to_string(idx) + "]";
    const json& node = nodes[idx];
    only_keys(node, where, {"id", "station_capacity", "preferred_capacity"});
    const long long id = integer(node, where, "id");
    if (id < 1 || id > static_cast<long long>(n) || !seen.insert(id).second) {
      throw ParseError(where + ".id", "ids must be exactly 1..N without repeats");
    }
    const long long cap = integer(node, where, "station_capacity");
    std::optional<double> preferred;
    if (node.contains("preferred_capacity")) {
      preferred = number(node, where, "preferred_capacity");
    }
    graph.set_station(static_cast<NodeId>(id), static_cast<int>(cap), preferred);
  }
  const json& edges = field(doc, "", "edges");
  if (!edges.is_array()) {
    throw ParseError("edges", "expected a list");
  }
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const std::string where = "edges[" + std::to_string(idx) + "]";
    const json& e = edges[idx];
    only_keys(e, where, {"i", "j", "miles", "free_flow_minutes", "link_capacity", "one_way"});
    const long long i = integer(e, where, "i");
    const long long j = integer(e, where, "j");
    if (i < 1 || j < 1 || i > static_cast<long long>(n) || j > static_cast<long long>(n)) {
      throw ParseError(where, "endpoint is not a declared node");
    }
    const bool one_way = flag(e, where, "one_way", false);
    const auto a = static_cast<NodeId>(i);
    const auto b = static_cast<NodeId>(j);
    if (graph.has_arc(a, b) || (!one_way && graph.has_arc(b, a))) {
      throw ParseError(where, "duplicate edge");
    }
    graph.add_road(a, b, number(e, where, "miles"), number(e, where, "free_flow_minutes"),
                   number(e, where, "link_capacity"), one_way);
  }
  return graph;
}

inline BatteryParams parse_battery(const json& doc) {
  const json& b = field(doc, "", "battery");
  const std::string where = "battery";
  only_keys(b, where,
            {"e_min", "e_max", "e_knee", "p_max", "chg_m", "chg_n", "deg_a", "deg_b", "deg_c"});
  const double e_min = number(b, where, "e_min");
  const double e_max = number(b, where, "e_max");
  const double e_knee = number(b, where, "e_knee");
  const double p_max = number(b, where, "p_max");
  const double chg_n = number(b, where, "chg_n");
  const double da = number(b, where, "deg_a");
  const double db = number(b, where, "deg_b");
  const double dc = number(b, where, "deg_c");
  if (b.contains("chg_m")) {
    return BatteryParams::with_offset(e_min, e_max, e_knee, p_max, number(b, where, "chg_m"),
                                      chg_n, da, db, dc);
  }
  return BatteryParams(e_min, e_max, e_knee, p_max, chg_n, da, db, dc);
}

inline void parse_vehicles(const json& doc, ScheduleProblem& p) {
  const json& v = field(doc, "", "vehicles");
  const std::string where = "vehicles";
  only_keys(v, where,
            {"base_speed", "t_s", "d_max", "drive_power", "drive_power_per_speed",
             "congestion_coupling", "bpr_curve", "cars"});
  MotionParams& mp = p.vehicle.motion;
  mp.base_speed = number(v, where, "base_speed");
  mp.t_s = number(v, where, "t_s");
  mp.d_max = number(v, where, "d_max");
  mp.drive_power = number(v, where, "drive_power");
  if (v.contains("drive_power_per_speed")) {
    mp.drive_power_per_speed = number(v, where, "drive_power_per_speed");
  }
  mp.congestion_coupling = flag(v, where, "congestion_coupling", false);
  if (v.contains("bpr_curve")) {
    const json& curve = v["bpr_curve"];
    if (curve == "linear") {
      mp.bpr_curve = BprCurve::Linear;
    } else if (curve == "quartic") {
      mp.bpr_curve = BprCurve::Quartic;
    } else {
      throw ParseError(where + ".bpr_curve", "expected \"linear\" or \"quartic\"");
    }
  }
  const json& cars = field(v, where, "cars");
  if (!cars.is_array() || cars.empty()) {
    throw ParseError(where + ".cars", "expected a non-empty list");
  }
  for (std::size_t idx = 0; idx < cars.size(); ++idx) {
    const std::string cw = where + ".cars[" + std::to_string(idx) + "]";
    only_keys(cars[idx], cw, {"start", "goal", "energy"});
    const long long start = integer(cars[idx], cw, "start");
    const long long goal = integer(cars[idx], cw, "goal");
    if (start < 1 || goal < 1) {
      throw ParseError(cw, "start/goal must be positive node ids");
    }
    p.cars.push_back(CarRequest{static_cast<NodeId>(start), static_cast<NodeId>(goal),
                                number(cars[idx], cw, "energy")});
  }
}

inline CostWeights parse_weights(const json& doc) {
  const json& w = field(doc, "", "weights");
  const std::string where = "weights";
  only_keys(w, where,
            {"station_unit_cost", "congestion_weight", "charging_time_weight",
             "waiting_time_weight", "station_cost_variant", "electricity_enabled",
             "electricity_price"});
  CostWeights out;
  out.station_unit_cost = number(w, where, "station_unit_cost");
  out.congestion_weight = number(w, where, "congestion_weight");
  out.charging_time_weight = number(w, where, "charging_time_weight");
  out.waiting_time_weight = number(w, where, "waiting_time_weight");
  if (w.contains("station_cost_variant")) {
    const json& v = w["station_cost_variant"];
    if (v == "absolute-deviation") {
      out.station_variant = StationCostVariant::AbsoluteDeviation;
    } else if (v == "literal") {
      out.station_variant = StationCostVariant::Literal;
    } else {
      throw ParseError(where + ".station_cost_variant",
                       "expected \"absolute-deviation\" or \"literal\"");
    }
  }
  out.electricity_enabled = flag(w, where, "electricity_enabled", false);
  if (w.contains("electricity_price")) {
    const json& table = w["electricity_price"];
    if (!table.is_array()) {
      throw ParseError(where + ".electricity_price", "expected a list of per-node rows");
    }
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string rw = where + ".electricity_price[" + std::to_string(r) + "]";
      if (!table[r].is_array()) {
        throw ParseError(rw, "expected a list of prices");
      }
      std::vector<double> row;
      for (const auto& cell : table[r]) {
        if (!cell.is_number()) {
          throw ParseError(rw, "expected numbers");
        }
        row.push_back(cell.get<double>());
      }
      out.electricity_price.push_back(std::move(row));
    }
  } else if (out.electricity_enabled) {
    throw ConfigError("weights: electricity_enabled requires electricity_price");
  }
  return out;
}

}  // namespace scenario_detail

/// Graph part of a scenario document, validated.
inline HighwayGraph parse_network(const std::string& text) {
  const auto doc = scenario_detail::parse_text(text);
  scenario_detail::check_top_level(doc);
  HighwayGraph graph = scenario_detail::parse_graph(doc);
  if (auto report = validate_graph(graph); !report.ok()) {
    throw ValidationError(std::move(report.violations));
  }
  return graph;
}

inline HighwayGraph load_network(const std::string& path) {
  return parse_network(scenario_detail::read_file(path));
}

/// Complete scheduling problem from a scenario document, validated.
inline ScheduleProblem parse_scenario(const std::string& text) {
  using namespace scenario_detail;
  const auto doc = parse_text(text);
  check_top_level(doc);
  ScheduleProblem p;
  p.graph = parse_graph(doc);
  if (auto report = validate_graph(p.graph); !report.ok()) {
    throw ValidationError(std::move(report.violations));
  }
  p.vehicle.battery = parse_battery(doc);
  parse_vehicles(doc, p);
  const json& h = field(doc, "", "horizon");
  if (!h.is_number_integer() || h.get<long long>() < 1) {
    throw ParseError("horizon", "expected a positive integer");
  }
  p.horizon = h.get<std::size_t>();
  p.weights = parse_weights(doc);
  if (auto v = p.violations(); !v.empty()) {
    throw ValidationError(std::move(v));
  }
  return p;
}

inline ScheduleProblem load_scenario(const std::string& path) {
  return parse_scenario(scenario_detail::read_file(path));
}

/// Inverse of parse_scenario for problems that start from parked cars.
inline nlohmann::json scenario_to_json(const ScheduleProblem& p) {
  using nlohmann::json;
  json doc;
  const HighwayGraph& g = p.graph;
  json nodes = json::array();
  for (NodeId i = 1; i <= g.size(); ++i) {
    nodes.push_back({{"id", i},
                     {"station_capacity", g.station(i).capacity},
                     {"preferred_capacity", g.station(i).preferred_capacity}});
  }
  json edges = json::array();
  for (NodeId i = 1; i <= g.size(); ++i) {
    for (NodeId j = 1; j <= g.size(); ++j) {
      const auto& a = g.arc(i, j);
      if (!a || (!a->one_way && j < i)) {
        continue;
      }
      json e = {{"i", i},
                {"j", j},
                {"miles", a->miles},
                {"free_flow_minutes", a->free_flow_minutes},
                {"link_capacity", a->link_capacity}};
      if (a->one_way) {
        e["one_way"] = true;
      }
      edges.push_back(std::move(e));
    }
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  const BatteryParams& b = p.vehicle.battery;
  doc["battery"] = {{"e_min", b.e_min()},   {"e_max", b.e_max()}, {"e_knee", b.e_knee()},
                    {"p_max", b.p_max()},   {"chg_n", b.chg_n()}, {"deg_a", b.deg_a()},
                    {"deg_b", b.deg_b()},   {"deg_c", b.deg_c()}};
  const MotionParams& m = p.vehicle.motion;
  json cars = json::array();
  for (const auto& c : p.cars) {
    cars.push_back({{"start", c.start}, {"goal", c.goal}, {"energy", c.initial_energy}});
  }
  doc["vehicles"] = {{"base_speed", m.base_speed},
                     {"t_s", m.t_s},
                     {"d_max", m.d_max},
                     {"drive_power", m.drive_power},
                     {"congestion_coupling", m.congestion_coupling},
                     {"bpr_curve", m.bpr_curve == BprCurve::Linear ? "linear" : "quartic"},
                     {"cars", cars}};
  if (m.drive_power_per_speed) {
    doc["vehicles"]["drive_power_per_speed"] = *m.drive_power_per_speed;
  }
  doc["horizon"] = p.horizon;
  const CostWeights& w = p.weights;
  doc["weights"] = {{"station_unit_cost", w.station_unit_cost},
                    {"congestion_weight", w.congestion_weight},
                    {"charging_time_weight", w.charging_time_weight},
                    {"waiting_time_weight", w.waiting_time_weight},
                    {"station_cost_variant", to_string(w.station_variant)},
                    {"electricity_enabled", w.electricity_enabled}};
  if (!w.electricity_price.empty()) {
    doc["weights"]["electricity_price"] = w.electricity_price;
  }
  return doc;
}

}  // namespace chargenet

#endif
