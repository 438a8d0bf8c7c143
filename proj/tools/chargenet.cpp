// chargenet: simulate, optimize, benchmark and check charging schedules.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chargenet/cli.hpp"
#include "chargenet/lp_reader.hpp"
#include "chargenet/lp_writer.hpp"
#include "chargenet/milp.hpp"
#include "chargenet/oracle.hpp"
#include "chargenet/properties.hpp"
#include "chargenet/scenario.hpp"
#include "chargenet/solver.hpp"

namespace fs = std::filesystem;
using namespace chargenet;
using nlohmann::json;

namespace {

struct Flags {
  std::string scenario;
  std::string out = "out";
  std::string plan;
  std::string export_lp;
  std::uint64_t seed = 1;
  std::uint64_t budget = 1'000'000;
  bool oracle = false;
  std::size_t depth = 8;
  std::size_t samples = 100;
  std::vector<std::size_t> horizons{4, 6, 8};
  std::vector<std::size_t> cars{1};
  std::vector<std::size_t> nodes{5};
  std::size_t repeats = 3;
};

void write_report(const fs::path& dir, const json& report) {
  cli::write_text(dir / "report.json", report.dump(2) + "\n");
}

int cmd_simulate(const Flags& f) {
  const std::string bytes = cli::read_text(f.scenario);
  const ScheduleProblem problem = parse_scenario(bytes);
  const Plan plan = cli::parse_plan(cli::read_text(f.plan), problem);
  json report = cli::report_header("simulate", f.scenario, bytes, {{"plan", f.plan}});
  report["plan"] = cli::plan_to_json(plan);
  const fs::path dir(f.out);
  try {
    const TrajectorySet t = simulate_execution(problem.initial_starts(), plan,
                                               problem.initial_context(), problem.vehicle);
    const CostBreakdown cost = problem.evaluate(t);
    cli::write_text(dir / "trajectory.csv", cli::trajectory_csv(t));
    report["status"] = "feasible";
    report["reaches_goals"] = reaches_goals(problem, t);
    report["cost"] = cli::cost_json(cost);
    write_report(dir, report);
    std::cout << "simulated " << t.cars.size() << " car(s) over " << t.horizon() << " step(s)\n";
    cli::print_costs(std::cout, cost);
    cli::print_modes(std::cout, t, problem.graph.size());
    return cli::kSuccess;
  } catch (const InfeasibleError& e) {
    report["status"] = "infeasible";
    report["error"] = {{"car", e.car()}, {"step", e.step()}, {"message", e.what()}};
    write_report(dir, report);
    std::cerr << "infeasible plan at step " << e.step() << " (car " << e.car() << "): " << e.what()
              << '\n';
    return cli::kInfeasible;
  }
}

int cmd_optimize(const Flags& f) {
  const std::string bytes = cli::read_text(f.scenario);
  const ScheduleProblem problem = parse_scenario(bytes);
  SolveOptions options;
  options.node_budget = f.budget;
  options.threads = cli::thread_count();
  const Solution sol = solve_exact(problem, options);
  json report = cli::report_header(
      "optimize", f.scenario, bytes,
      {{"budget", f.budget}, {"oracle", f.oracle}, {"export_lp", f.export_lp}, {"threads", options.threads}});
  report["status"] = to_string(sol.status);
  report["solver"] = {{"nodes_explored", sol.nodes_explored}, {"wall_time_s", sol.wall_time}};
  const fs::path dir(f.out);

  if (!f.export_lp.empty()) {
    const MilpModel model = encode_bigm(problem);
    cli::write_text(f.export_lp, to_lp_string(model));
    (void)read_lp(f.export_lp);  // the file must pass the grammar check
    report["lp"] = {{"path", f.export_lp},
                    {"variables", model.variables.size()},
                    {"binaries", model.binary_count()},
                    {"constraints", model.constraints.size()}};
    std::cout << "wrote " << f.export_lp << " (" << model.variables.size() << " variables, "
              << model.binary_count() << " binary, " << model.constraints.size()
              << " constraints)\n";
  }

  std::cout << "status: " << to_string(sol.status) << "  nodes: " << sol.nodes_explored
            << "  time: " << sol.wall_time << " s\n";
  if (sol.inputs.empty()) {
    write_report(dir, report);
    std::cerr << "no feasible schedule found\n";
    return cli::kInfeasible;
  }
  report["cost"] = cli::cost_json(sol.cost);
  report["plan"] = cli::plan_to_json(sol.inputs);
  cli::write_text(dir / "plan.json", cli::plan_to_json(sol.inputs).dump(2) + "\n");
  cli::write_text(dir / "trajectory.csv", cli::trajectory_csv(sol.trajectories));
  cli::write_text(dir / "cost_trace.csv",
                  cli::cost_trace_csv(cost_trace(sol.trajectories, problem.graph, problem.weights,
                                                 problem.vehicle.battery,
                                                 problem.vehicle.motion.t_s, problem.step_offset)));
  cli::print_costs(std::cout, sol.cost);
  cli::print_modes(std::cout, sol.trajectories, problem.graph.size());

  int code = cli::kSuccess;
  if (f.oracle) {
    const Solution ref = brute_force_oracle(problem);
    const bool both_feasible = ref.status == SolveStatus::Optimal;
    const double tol = 1e-9 * std::max(1.0, std::abs(ref.cost.total));
    const bool match = both_feasible && sol.status == SolveStatus::Optimal &&
                       std::abs(ref.cost.total - sol.cost.total) <= tol;
    report["oracle"] = {{"status", to_string(ref.status)},
                        {"total", ref.cost.total},
                        {"leaves", ref.nodes_explored},
                        {"match", match}};
    std::cout << "oracle: " << to_string(ref.status) << " total " << format_number(ref.cost.total)
              << (match ? "  (match)" : "  (MISMATCH)") << '\n';
    if (!match) {
      code = cli::kOracleMismatch;
    }
  }
  write_report(dir, report);
  return code;
}

int cmd_bench(const Flags& f) {
  const std::string bytes = cli::read_text(f.scenario);
  const ScheduleProblem tmpl = parse_scenario(bytes);
  cli::BenchSweep sweep;
  sweep.horizons = f.horizons;
  sweep.cars = f.cars;
  sweep.nodes = f.nodes;
  sweep.repeats = f.repeats;
  sweep.solve.node_budget = f.budget;
  sweep.solve.threads = cli::thread_count();
  const auto rows = cli::run_bench(tmpl, sweep);
  const fs::path dir(f.out);
  cli::write_text(dir / "bench.csv", cli::bench_csv(rows));
  std::cout << "H_p  p  N  median_s     censored\n";
  for (const std::size_t n : sweep.nodes) {
    for (const std::size_t p : sweep.cars) {
      for (const std::size_t h : sweep.horizons) {
        std::size_t censored = 0;
        for (const auto& r : rows) {
          censored += (r.horizon == h && r.cars == p && r.nodes == n && r.censored) ? 1 : 0;
        }
        std::cout << h << "  " << p << "  " << n << "  " << cli::cell_median(rows, h, p, n)
                  << "  " << censored << '\n';
      }
    }
  }
  json report = cli::report_header("bench", f.scenario, bytes,
                                   {{"horizons", f.horizons},
                                    {"cars", f.cars},
                                    {"nodes", f.nodes},
                                    {"repeats", f.repeats},
                                    {"budget", f.budget}});
  report["status"] = "done";
  report["rows"] = rows.size();
  write_report(dir, report);
  return cli::kSuccess;
}

int cmd_check(const Flags& f) {
  const std::string bytes = cli::read_text(f.scenario);
  const ScheduleProblem problem = parse_scenario(bytes);
  PropertyOptions options;
  options.depth = f.depth;
  options.samples = f.samples;
  options.seed = f.seed;
  const PropertyReport r = check_properties(problem, options);
  auto line = [](const char* name, const PropertyVerdict& v) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << '\n';
  };
  line("non-blocking", r.non_blocking);
  line("domain-preserving", r.domain_preserving);
  line("non-zeno", r.non_zeno);
  line("capacity", r.capacity);
  std::cout << r.states_explored << " states explored, " << r.nondeterministic_states
            << " with a choice, " << r.samples_run << " random rollouts"
            << (r.truncated ? " (exploration truncated)" : "") << '\n';
  json report = cli::report_header("check", f.scenario, bytes,
                                   {{"depth", f.depth}, {"samples", f.samples}, {"seed", f.seed}});
  report["status"] = r.all_pass() ? "pass" : "fail";
  report["properties"] = cli::property_json(r);
  write_report(fs::path(f.out), report);
  return r.all_pass() ? cli::kSuccess : cli::kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charging schedules for electric vehicles on a highway graph"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", f.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
  };
  auto* simulate = app.add_subcommand("simulate", "Roll a plan forward and export the trajectory");
  common(simulate);
  simulate->add_option("--plan", f.plan, "Plan JSON file")->required()->check(CLI::ExistingFile);

  auto* optimize = app.add_subcommand("optimize", "Find the cheapest schedule");
  common(optimize);
  optimize->add_option("--budget", f.budget, "Search node budget")->capture_default_str();
  optimize->add_flag("--oracle", f.oracle, "Cross-check against exhaustive enumeration");
  optimize->add_option("--export-lp", f.export_lp, "Write the big-M model as an LP file");

  auto* bench = app.add_subcommand("bench", "Time the solver over a parameter sweep");
  common(bench);
  bench->add_option("--budget", f.budget, "Search node budget per solve")->capture_default_str();
  bench->add_option("--horizons", f.horizons, "Horizon lengths")->delimiter(',')->capture_default_str();
  bench->add_option("--cars", f.cars, "Car counts")->delimiter(',')->capture_default_str();
  bench->add_option("--nodes", f.nodes, "Node counts")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", f.repeats, "Timed runs per cell")->capture_default_str();

  auto* check = app.add_subcommand("check", "Check automaton properties by exploration");
  common(check);
  check->add_option("--depth", f.depth, "Exploration depth in steps")->capture_default_str();
  check->add_option("--samples", f.samples, "Random joint rollouts")->capture_default_str();
  check->add_option("--seed", f.seed, "Rollout seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputError;
  }

  try {
    if (*simulate) {
      return cmd_simulate(f);
    }
    if (*optimize) {
      return cmd_optimize(f);
    }
    if (*bench) {
      return cmd_bench(f);
    }
    return cmd_check(f);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return cli::kInfeasible;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& v : e.violations()) {
      std::cerr << "  " << v << '\n';
    }
    return cli::kInputError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  }
}
