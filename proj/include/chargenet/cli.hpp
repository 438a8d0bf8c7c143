#ifndef CHARGENET_CLI_HPP
#define CHARGENET_CLI_HPP

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "chargenet/automaton.hpp"
#include "chargenet/costs.hpp"
#include "chargenet/errors.hpp"
#include "chargenet/lp_writer.hpp"
#include "chargenet/problem.hpp"
#include "chargenet/properties.hpp"
#include "chargenet/scenario.hpp"
#include "chargenet/solver.hpp"

// Building blocks of the chargenet command-line tool. Kept in the library so
// the tests can drive them without spawning processes.

namespace chargenet::cli {

/// Stable exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kPropertyFailure = 1,
  kInfeasible = 2,
  kOracleMismatch = 3,
  kInputError = 4,
};

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256: digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

/// Worker count: CHARGE_NET_THREADS when set, capped by the hardware; else 1.
inline unsigned thread_count() {
  const char* env = std::getenv("CHARGE_NET_THREADS");
  if (env == nullptr || *env == '\0') {
    return 1;
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    throw ConfigError("CHARGE_NET_THREADS must be a positive integer");
  }
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return std::min(static_cast<unsigned>(v), hw);
}

// ---- plans ---------------------------------------------------------------

inline nlohmann::json input_to_json(const DiscreteInput& u) {
  return {{"gamma", u.gamma}, {"charge", u.charge}, {"edge", u.edge.value}};
}

inline nlohmann::json plan_to_json(const Plan& plan) {
  nlohmann::json cars = nlohmann::json::array();
  for (const auto& seq : plan) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& u : seq) {
      row.push_back(input_to_json(u));
    }
    cars.push_back(std::move(row));
  }
  return {{"cars", cars}};
}

/// Plan documents hold {"cars": [[step, ...], ...]}. A step is either
/// {"gamma", "charge", "edge"} or one of the strings "wait", "charge" and
/// "drive:i->j"; wait and charge keep the current edge selection.
inline Plan parse_plan(const std::string& text, const ScheduleProblem& problem) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("plan", e.what());
  }
  if (!doc.is_object() || !doc.contains("cars") || !doc["cars"].is_array()) {
    throw ParseError("plan", "expected an object with a \"cars\" list");
  }
  for (const auto& item : doc.items()) {
    if (item.key() != "cars") {
      throw ParseError("plan." + item.key(), "unknown key");
    }
  }
  const std::size_t n = problem.graph.size();
  const auto starts = problem.initial_starts();
  const auto& cars = doc["cars"];
  if (cars.size() != problem.cars.size()) {
    throw ParseError("plan.cars", "expected one sequence per car");
  }
  Plan plan;
  for (std::size_t c = 0; c < cars.size(); ++c) {
    const std::string where = "plan.cars[" + std::to_string(c) + "]";
    if (!cars[c].is_array()) {
      throw ParseError(where, "expected a list of steps");
    }
    EdgeIndex kept = starts[c].previous.edge;
    std::vector<DiscreteInput> seq;
    for (std::size_t k = 0; k < cars[c].size(); ++k) {
      const auto& step = cars[c][k];
      const std::string sw = where + "[" + std::to_string(k) + "]";
      DiscreteInput u;
      if (step.is_string()) {
        const std::string s = step.get<std::string>();
        if (s == "wait" || s == "charge") {
          u = DiscreteInput{true, s == "charge", kept};
        } else if (s.rfind("drive:", 0) == 0) {
          const auto arrow = s.find("->");
          try {
            if (arrow == std::string::npos) {
              throw std::invalid_argument(s);
            }
            const auto i = static_cast<NodeId>(std::stoul(s.substr(6, arrow - 6)));
            const auto j = static_cast<NodeId>(std::stoul(s.substr(arrow + 2)));
            u = DiscreteInput{false, false, edge_index(i, j, n)};
          } catch (const std::invalid_argument&) {
            throw ParseError(sw, "expected drive:i->j");
          } catch (const std::out_of_range&) {
            throw ParseError(sw, "node id out of range");
          }
        } else {
          throw ParseError(sw, "unknown step '" + s + "'");
        }
      } else if (step.is_object()) {
        for (const auto& item : step.items()) {
          if (item.key() != "gamma" && item.key() != "charge" && item.key() != "edge") {
            throw ParseError(sw + "." + item.key(), "unknown key");
          }
        }
        if (!step.contains("gamma") || !step.contains("charge") || !step.contains("edge") ||
            !step["gamma"].is_boolean() || !step["charge"].is_boolean() ||
            !step["edge"].is_number_unsigned()) {
          throw ParseError(sw, "expected gamma (bool), charge (bool) and edge (index)");
        }
        const auto h = step["edge"].get<std::size_t>();
        if (h < 1 || h > n * n) {
          throw ParseError(sw + ".edge", "edge index out of range");
        }
        u = DiscreteInput{step["gamma"].get<bool>(), step["charge"].get<bool>(), EdgeIndex{h}};
      } else {
        throw ParseError(sw, "expected a string or an object");
      }
      kept = u.edge;
      seq.push_back(u);
    }
    plan.push_back(std::move(seq));
  }
  const std::size_t len = plan.empty() ? 0 : plan.front().size();
  for (const auto& seq : plan) {
    if (seq.size() != len) {
      throw ParseError("plan.cars", "all cars need the same number of steps");
    }
  }
  return plan;
}

// ---- tables ----------------------------------------------------------------

inline std::string trajectory_csv(const TrajectorySet& t) {
  std::ostringstream out;
  out << "car,step,mode,location,edge_progress,trip_distance,energy,gamma,charge,edge\n";
  for (const auto& r : trajectory_records(t)) {
    out << r.car << ',' << r.step << ',' << to_string(r.mode) << ',' << r.location << ','
        << format_number(r.edge_progress) << ',' << format_number(r.trip_distance) << ','
        << format_number(r.energy) << ',' << (r.gamma ? 1 : 0) << ',' << (r.charge ? 1 : 0) << ','
        << r.edge << '\n';
  }
  return out.str();
}

inline std::string cost_trace_csv(const std::vector<CostBreakdown>& rows) {
  std::ostringstream out;
  out << "step,station,electricity,congestion,charging_time,waiting_time,degradation,total\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    out << k << ',' << format_number(r.station) << ',' << format_number(r.electricity) << ','
        << format_number(r.congestion) << ',' << format_number(r.charging_time) << ','
        << format_number(r.waiting_time) << ',' << format_number(r.degradation) << ','
        << format_number(r.total) << '\n';
  }
  return out.str();
}

inline nlohmann::json cost_json(const CostBreakdown& c) {
  return {{"station", c.station},           {"electricity", c.electricity},
          {"congestion", c.congestion},     {"charging_time", c.charging_time},
          {"waiting_time", c.waiting_time}, {"degradation", c.degradation},
          {"total", c.total}};
}

inline void print_costs(std::ostream& out, const CostBreakdown& c) {
  const std::pair<const char*, double> rows[] = {
      {"station", c.station},           {"electricity", c.electricity},
      {"congestion", c.congestion},     {"charging time", c.charging_time},
      {"waiting time", c.waiting_time}, {"degradation", c.degradation},
      {"total", c.total}};
  for (const auto& [label, value] : rows) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(6) << value;
    out << "  " << std::left << std::setw(14) << label << std::right << std::setw(14)
        << cell.str() << '\n';
  }
}

/// One line per car: a mode letter per step (D, W, C) and the edges used.
inline void print_modes(std::ostream& out, const TrajectorySet& t, std::size_t n) {
  for (std::size_t c = 0; c < t.cars.size(); ++c) {
    out << "  car " << c + 1 << ": ";
    for (const auto& u : t.cars[c].inputs) {
      const Mode m = mode_select(u);
      out << (m == Mode::Driving ? 'D' : m == Mode::Charging ? 'C' : 'W');
    }
    out << "  route";
    std::size_t last = 0;
    for (const auto& u : t.cars[c].inputs) {
      if (!u.gamma && u.edge.value != last) {
        const auto [i, j] = decode_edge(u.edge, n);
        out << ' ' << i << "->" << j;
        last = u.edge.value;
      }
    }
    out << '\n';
  }
}

inline nlohmann::json verdict_json(const PropertyVerdict& v) {
  nlohmann::json out = {{"pass", v.pass}, {"detail", v.detail}};
  if (!v.pass && v.car != 0) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& s : v.witness.states) {
      path.push_back({{"location", location_name(s.position)},
                      {"energy", s.energy},
                      {"trip_distance", s.trip_distance},
                      {"edge_progress", s.edge_progress},
                      {"mode", to_string(s.mode)}});
    }
    out["witness"] = {{"car", v.car}, {"states", path}};
  }
  return out;
}

inline nlohmann::json property_json(const PropertyReport& r) {
  return {{"non_blocking", verdict_json(r.non_blocking)},
          {"domain_preserving", verdict_json(r.domain_preserving)},
          {"non_zeno", verdict_json(r.non_zeno)},
          {"capacity", verdict_json(r.capacity)},
          {"states_explored", r.states_explored},
          {"nondeterministic_states", r.nondeterministic_states},
          {"samples", r.samples_run},
          {"truncated", r.truncated}};
}

/// Skeleton of every run report.
inline nlohmann::json report_header(const std::string& command, const std::string& scenario_path,
                                    const std::string& scenario_bytes,
                                    const nlohmann::json& parameters) {
  return {{"command", command},
          {"parameters", parameters},
          {"scenario", {{"path", scenario_path}, {"sha256", sha256_hex(scenario_bytes)}}}};
}

// ---- benchmark -------------------------------------------------------------

/// Template problem resized to `nodes` nodes and `cars` cars. Extra nodes hang
/// off the template as a chain that also links back to the existing nodes;
/// fewer nodes keep the first `nodes` template nodes. Cars cycle through the
/// template's requests.
inline ScheduleProblem resize_problem(const ScheduleProblem& tmpl, std::size_t nodes,
                                      std::size_t cars, std::size_t horizon) {
  const HighwayGraph& g0 = tmpl.graph;
  const std::size_t n0 = g0.size();
  ScheduleProblem p = tmpl;
  p.horizon = horizon;
  HighwayGraph g(nodes);
  double mean = 0.0;
  double mean_t0 = 0.0;
  double mean_cap = 0.0;
  std::size_t count = 0;
  for (NodeId i = 1; i <= n0; ++i) {
    for (NodeId j = 1; j <= n0; ++j) {
      if (const auto& a = g0.arc(i, j)) {
        mean += a->miles;
        mean_t0 += a->free_flow_minutes;
        mean_cap += a->link_capacity;
        ++count;
      }
    }
  }
  if (count == 0) {
    throw ArgumentError("resize_problem: template has no edges");
  }
  mean /= static_cast<double>(count);
  mean_t0 /= static_cast<double>(count);
  mean_cap /= static_cast<double>(count);
  const std::size_t keep = std::min(nodes, n0);
  for (NodeId i = 1; i <= keep; ++i) {
    g.set_station(i, g0.station(i).capacity, g0.station(i).preferred_capacity);
    for (NodeId j = 1; j <= keep; ++j) {
      if (const auto& a = g0.arc(i, j)) {
        g.set_arc(i, j, *a);
      }
    }
  }
  for (NodeId i = n0 + 1; i <= nodes; ++i) {
    g.set_station(i, 1, std::nullopt);
    const NodeId anchor = ((i - n0 - 1) % n0) + 1;
    g.add_road(i, anchor, mean, mean_t0, mean_cap);
    g.add_road(i, i - 1 == anchor ? (anchor % n0) + 1 : i - 1, mean, mean_t0, mean_cap);
  }
  p.graph = std::move(g);
  p.cars.clear();
  for (std::size_t c = 0; c < cars; ++c) {
    CarRequest r = tmpl.cars[c % tmpl.cars.size()];
    r.start = std::min<NodeId>(r.start, nodes);
    r.goal = std::min<NodeId>(r.goal, nodes);
    p.cars.push_back(r);
  }
  if (p.weights.electricity_enabled) {
    auto& table = p.weights.electricity_price;
    table.resize(nodes, table.empty() ? std::vector<double>{0.0} : table.front());
    for (auto& row : table) {
      row.resize(horizon, row.empty() ? 0.0 : row.back());
    }
  }
  if (const auto longest = longest_simple_path(p.graph); longest) {
    p.vehicle.motion.d_max = std::max(p.vehicle.motion.d_max, *longest + mean);
  }
  p.starts.reset();
  return p;
}

struct BenchRow {
  std::size_t horizon = 0;
  std::size_t cars = 0;
  std::size_t nodes = 0;
  std::size_t repeat = 0;
  double seconds = 0.0;
  std::uint64_t nodes_explored = 0;
  bool censored = false;
};

struct BenchSweep {
  std::vector<std::size_t> horizons{4, 6, 8};
  std::vector<std::size_t> cars{1};
  std::vector<std::size_t> nodes{5};
  std::size_t repeats = 3;
  SolveOptions solve;
};

/// Runs every cell once as warmup, then `repeats` timed runs.
inline std::vector<BenchRow> run_bench(const ScheduleProblem& tmpl, const BenchSweep& sweep) {
  std::vector<BenchRow> rows;
  for (const std::size_t n : sweep.nodes) {
    for (const std::size_t p : sweep.cars) {
      for (const std::size_t h : sweep.horizons) {
        const ScheduleProblem problem = resize_problem(tmpl, n, p, h);
        (void)solve_exact(problem, sweep.solve);
        for (std::size_t r = 0; r < sweep.repeats; ++r) {
          const Solution s = solve_exact(problem, sweep.solve);
          rows.push_back(BenchRow{h, p, n, r, s.wall_time, s.nodes_explored,
                                  s.status == SolveStatus::BudgetExhausted});
        }
      }
    }
  }
  return rows;
}

inline double median(std::vector<double> v) {
  if (v.empty()) {
    return 0.0;
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

/// Median seconds of the rows matching one cell.
inline double cell_median(const std::vector<BenchRow>& rows, std::size_t horizon,
                          std::size_t cars, std::size_t nodes) {
  std::vector<double> secs;
  for (const auto& r : rows) {
    if (r.horizon == horizon && r.cars == cars && r.nodes == nodes) {
      secs.push_back(r.seconds);
    }
  }
  return median(secs);
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "H_p,p,N,repeat,seconds,nodes,censored\n";
  for (const auto& r : rows) {
    out << r.horizon << ',' << r.cars << ',' << r.nodes << ',' << r.repeat << ','
        << format_number(r.seconds) << ',' << r.nodes_explored << ',' << (r.censored ? 1 : 0)
        << '\n';
  }
  return out.str();
}

}  // namespace chargenet::cli

#endif
