#include <gtest/gtest.h>

#include <cstdlib>

#include "chargenet/cli.hpp"
#include "chargenet/solver.hpp"
#include "support.hpp"

using namespace chargenet;
using chargenet::testing::fixture;

namespace {

/// Sets CHARGE_NET_THREADS for one scope.
class ThreadsEnv {
public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("CHARGE_NET_THREADS")) {
      saved_ = old;
    }
    if (value) {
      ::setenv("CHARGE_NET_THREADS", value, 1);
    } else {
      ::unsetenv("CHARGE_NET_THREADS");
    }
  }
  ~ThreadsEnv() {
    if (saved_) {
      ::setenv("CHARGE_NET_THREADS", saved_->c_str(), 1);
    } else {
      ::unsetenv("CHARGE_NET_THREADS");
    }
  }
  ThreadsEnv(const ThreadsEnv&) = delete;
  ThreadsEnv& operator=(const ThreadsEnv&) = delete;

private:
  std::optional<std::string> saved_;
};

std::string parse_plan_context(const std::string& text, const ScheduleProblem& p) {
  try {
    (void)cli::parse_plan(text, p);
  } catch (const ParseError& e) {
    return e.context();
  }
  return "<no error>";
}

}  // namespace

TEST(Cli, Sha256KnownDigest) {
  EXPECT_EQ(cli::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(cli::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Cli, ParsesShorthandPlans) {
  const ScheduleProblem p = fixture("two_node");
  const Plan plan = cli::parse_plan(R"({"cars": [["charge", "drive:1->2", "drive:1->2"]]})", p);
  const EdgeIndex park = parked_at(1, 2);
  const EdgeIndex road = edge_index(1, 2, 2);
  ASSERT_EQ(plan.size(), 1u);
  EXPECT_EQ(plan[0][0], (DiscreteInput{true, true, park}));
  EXPECT_EQ(plan[0][1], (DiscreteInput{false, false, road}));
  const Plan same = cli::parse_plan(cli::plan_to_json(plan).dump(), p);
  EXPECT_EQ(same, plan);
}

TEST(Cli, WaitKeepsPreviousEdge) {
  const ScheduleProblem p = fixture("two_node");
  const Plan plan = cli::parse_plan(R"({"cars": [["drive:1->2", "wait", "wait"]]})", p);
  EXPECT_EQ(plan[0][2].edge, edge_index(1, 2, 2));
}

TEST(Cli, PlanErrorsNameTheStep) {
  const ScheduleProblem p = fixture("two_node");
  EXPECT_EQ(parse_plan_context(R"({"cars": [["fly"]]})", p), "plan.cars[0][0]");
  EXPECT_EQ(parse_plan_context(R"({"cars": [["wait", "drive:1-2"]]})", p), "plan.cars[0][1]");
  EXPECT_EQ(parse_plan_context(R"({"cars": [[{"gamma": true, "charge": false, "edge": 9}]]})", p),
            "plan.cars[0][0].edge");
  EXPECT_EQ(parse_plan_context(R"({"cars": []})", p), "plan.cars");
  EXPECT_EQ(parse_plan_context(R"({"cars": [[]], "x": 1})", p), "plan.x");
  EXPECT_EQ(parse_plan_context("[", p), "plan");
}

TEST(Cli, CsvOutputIsStable) {
  const ScheduleProblem p = fixture("five_node");
  const Solution a = solve_exact(p);
  const Solution b = solve_exact(p);
  const std::string csv = cli::trajectory_csv(a.trajectories);
  EXPECT_EQ(csv, cli::trajectory_csv(b.trajectories));
  // Header plus one row per car and step.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(1 + 2 * p.horizon));
  const auto trace = cost_trace(a.trajectories, p.graph, p.weights, p.vehicle.battery,
                                p.vehicle.motion.t_s);
  EXPECT_EQ(cli::cost_trace_csv(trace), cli::cost_trace_csv(trace));
}

TEST(Cli, ThreadCountFromEnvironment) {
  {
    const ThreadsEnv env(nullptr);
    EXPECT_EQ(cli::thread_count(), 1u);
  }
  {
    const ThreadsEnv env("1");
    EXPECT_EQ(cli::thread_count(), 1u);
  }
  {
    const ThreadsEnv env("100000");
    EXPECT_GE(cli::thread_count(), 1u);
    EXPECT_LE(cli::thread_count(), std::max(1u, std::thread::hardware_concurrency()));
  }
  for (const char* bad : {"0", "-2", "four", "3x"}) {
    const ThreadsEnv env(bad);
    EXPECT_THROW((void)cli::thread_count(), ConfigError) << bad;
  }
}

TEST(Cli, ResizeKeepsProblemsValid) {
  const ScheduleProblem tmpl = fixture("five_node");
  for (std::size_t n : {3u, 5u, 7u, 9u}) {
    for (std::size_t cars : {1u, 3u}) {
      const ScheduleProblem p = cli::resize_problem(tmpl, n, cars, 5);
      EXPECT_EQ(p.graph.size(), n);
      EXPECT_EQ(p.cars.size(), cars);
      EXPECT_EQ(p.horizon, 5u);
      EXPECT_TRUE(p.violations().empty()) << "N=" << n << " p=" << cars;
    }
  }
  const ScheduleProblem same = cli::resize_problem(tmpl, 5, 2, tmpl.horizon);
  EXPECT_EQ(same.graph.size(), tmpl.graph.size());
  EXPECT_EQ(same.graph.length(2, 4), tmpl.graph.length(2, 4));
}

TEST(Cli, Medians) {
  EXPECT_EQ(cli::median({}), 0.0);
  EXPECT_EQ(cli::median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(cli::median({4.0, 1.0, 2.0, 3.0}), 2.5);
  const std::vector<cli::BenchRow> rows{{4, 1, 5, 0, 1.0, 10, false},
                                        {4, 1, 5, 1, 3.0, 10, false},
                                        {4, 1, 5, 2, 2.0, 10, false},
                                        {6, 1, 5, 0, 9.0, 10, false}};
  EXPECT_EQ(cli::cell_median(rows, 4, 1, 5), 2.0);
  EXPECT_EQ(cli::cell_median(rows, 6, 1, 5), 9.0);
  EXPECT_EQ(cli::bench_csv(rows).substr(0, 5), "H_p,p");
}
