#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "chargenet/lp_reader.hpp"
#include "chargenet/lp_writer.hpp"
#include "chargenet/milp.hpp"
#include "chargenet/solver.hpp"
#include "support.hpp"

using namespace chargenet;
using chargenet::testing::fixture;
using chargenet::testing::random_problem;

namespace {

const char* const kLinearFixtures[] = {"five_node", "two_node", "shared_station", "reroute",
                                       "two_station_capacity"};

/// Random admissible rollout that keeps going until the horizon; empty when
/// some car gets blocked.
std::optional<TrajectorySet> random_rollout(const ScheduleProblem& p, std::mt19937_64& rng) {
  WorldContext ctx = p.initial_context();
  const auto starts = p.initial_starts();
  TrajectorySet t;
  std::vector<DiscreteInput> prev;
  for (const auto& s : starts) {
    t.cars.push_back(CarTrajectory{{s.state}, {}});
    prev.push_back(s.previous);
  }
  for (std::size_t k = 0; k < p.horizon; ++k) {
    for (std::size_t c = 0; c < starts.size(); ++c) {
      const VehicleState s = t.cars[c].states.back();
      const auto moves = successors(s, ctx, prev[c], p.vehicle);
      if (moves.empty()) {
        return std::nullopt;
      }
      const Move& m = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
      ctx.commit(detail::resting_node(s, p.graph), m.input);
      t.cars[c].states.push_back(m.next);
      t.cars[c].inputs.push_back(m.input);
      prev[c] = m.input;
    }
    ctx.next_step();
  }
  return t;
}

/// Terminal rows only hold for plans that reach every goal.
bool terminal_row(const std::string& name) { return name.rfind("goal", 0) == 0; }

std::vector<RowViolation> non_terminal(std::vector<RowViolation> v) {
  std::erase_if(v, [](const RowViolation& r) { return terminal_row(r.name); });
  return v;
}

std::string describe(const std::vector<RowViolation>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::min<std::size_t>(v.size(), 5); ++i) {
    out << v[i].name << " (" << v[i].slack << ") ";
  }
  return out.str();
}

}  // namespace

TEST(Milp, BinaryCountFollowsFormula) {
  for (const char* name : kLinearFixtures) {
    const ScheduleProblem p = fixture(name);
    const std::size_t n = p.graph.size();
    const MilpModel m = encode_bigm(p);
    EXPECT_EQ(m.binary_count(), p.cars.size() * p.horizon * (2 + n * n + 3 + 2)) << name;
  }
}

TEST(Milp, OptimalPlansSatisfyEveryRow) {
  for (const char* name : kLinearFixtures) {
    const ScheduleProblem p = fixture(name);
    const Solution s = solve_exact(p);
    ASSERT_FALSE(s.inputs.empty()) << name;
    const MilpModel m = encode_bigm(p);
    const auto x = assignment_from_trajectories(m, p, s.trajectories);
    const auto bad = check_assignment(m, x);
    EXPECT_TRUE(bad.empty()) << name << ": " << describe(bad);
    EXPECT_EQ(decode_inputs(m, p, x), s.inputs) << name;
    EXPECT_NEAR(objective_value(m, x), s.cost.total - s.cost.degradation, 1e-9) << name;
  }
}

TEST(Milp, RandomRolloutsSatisfyNonTerminalRows) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (const char* name : kLinearFixtures) {
    const ScheduleProblem p = fixture(name);
    const MilpModel m = encode_bigm(p);
    for (int i = 0; i < 40; ++i) {
      const auto t = random_rollout(p, rng);
      if (!t) {
        continue;
      }
      ++checked;
      const auto x = assignment_from_trajectories(m, p, *t);
      const auto bad = non_terminal(check_assignment(m, x));
      ASSERT_TRUE(bad.empty()) << name << " rollout " << i << ": " << describe(bad);
      const CostBreakdown c = p.evaluate(*t);
      EXPECT_NEAR(objective_value(m, x), c.total - c.degradation, 1e-9);
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Milp, RandomProblemsWithPrices) {
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 20) {
    ScheduleProblem p = random_problem(rng);
    if (p.vehicle.motion.congestion_coupling ||
        p.weights.station_variant != StationCostVariant::AbsoluteDeviation) {
      continue;
    }
    const MilpModel m = encode_bigm(p);
    for (int i = 0; i < 10; ++i) {
      if (const auto t = random_rollout(p, rng)) {
        const auto x = assignment_from_trajectories(m, p, *t);
        const auto bad = non_terminal(check_assignment(m, x));
        ASSERT_TRUE(bad.empty()) << describe(bad);
      }
    }
    ++checked;
  }
}

TEST(Milp, CorruptedAssignmentsAreCaught) {
  const ScheduleProblem p = fixture("two_node");
  const Solution s = solve_exact(p);
  const MilpModel m = encode_bigm(p);
  const auto good = assignment_from_trajectories(m, p, s.trajectories);
  ASSERT_TRUE(check_assignment(m, good).empty());

  auto x = good;
  x[m.at("gamma_c1_k1")] = 1.0;  // claims to stop mid-edge
  EXPECT_FALSE(check_assignment(m, x).empty());

  x = good;
  x[m.at("E_c1_k3")] += 1.0;  // energy appears from nowhere
  EXPECT_FALSE(check_assignment(m, x).empty());

  x = good;
  x[m.at("y_c1_k0")] = 0.5;
  EXPECT_FALSE(check_assignment(m, x).empty());
}

TEST(Milp, RejectsNonlinearVariants) {
  ScheduleProblem p = fixture("two_node");
  p.vehicle.motion.congestion_coupling = true;
  EXPECT_THROW((void)encode_bigm(p), ArgumentError);
  p = fixture("two_node");
  p.weights.station_variant = StationCostVariant::Literal;
  EXPECT_THROW((void)encode_bigm(p), ArgumentError);
}

TEST(Milp, ModelRejectsDuplicatesAndEmptyBounds) {
  MilpModel m;
  m.add_variable("x", VarKind::Continuous, 0, 1);
  EXPECT_THROW(m.add_variable("x", VarKind::Binary, 0, 1), ArgumentError);
  EXPECT_THROW(m.add_variable("y", VarKind::Continuous, 2, 1), ArgumentError);
  EXPECT_THROW((void)m.at("z"), ArgumentError);
}

TEST(LpWriter, NumbersReadBack) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(2.5), "2.5");
  EXPECT_EQ(format_number(1e-6), "1e-06");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(LpWriter, IsDeterministicAndShort) {
  const ScheduleProblem p = fixture("five_node");
  const std::string a = to_lp_string(encode_bigm(p));
  const std::string b = to_lp_string(encode_bigm(p));
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string line;
  while (std::getline(in, line)) {
    ASSERT_LE(line.size(), kLpMaxLine);
  }
}

TEST(LpWriter, EmptyModelIsValid) {
  const std::string text = to_lp_string(MilpModel{});
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
  const MilpModel back = parse_lp(text);
  EXPECT_TRUE(back.variables.empty());
  EXPECT_TRUE(back.constraints.empty());
}

TEST(LpWriter, RoundTripsFixtures) {
  for (const char* name : kLinearFixtures) {
    const MilpModel m = encode_bigm(fixture(name));
    const MilpModel back = parse_lp(to_lp_string(m));
    ASSERT_EQ(back.variables.size(), m.variables.size()) << name;
    ASSERT_EQ(back.constraints.size(), m.constraints.size()) << name;
    EXPECT_EQ(back.binary_count(), m.binary_count()) << name;
    for (const auto& v : m.variables) {
      const Variable& w = back.variables[back.at(v.name)];
      EXPECT_EQ(w.kind, v.kind) << v.name;
      EXPECT_EQ(w.lower, v.lower) << v.name;
      EXPECT_EQ(w.upper, v.upper) << v.name;
    }
    for (std::size_t r = 0; r < m.constraints.size(); ++r) {
      const Constraint& c = m.constraints[r];
      const Constraint& d = back.constraints[r];
      ASSERT_EQ(d.name, c.name);
      EXPECT_EQ(d.sense, c.sense) << c.name;
      EXPECT_EQ(d.rhs, c.rhs) << c.name;
      std::map<std::string, double> want;
      std::map<std::string, double> got;
      for (const auto& t : c.terms) {
        want[m.variables[t.var].name] += t.coef;
      }
      for (const auto& t : d.terms) {
        got[back.variables[t.var].name] += t.coef;
      }
      EXPECT_EQ(got, want) << c.name;
    }
    std::map<std::string, double> want_obj;
    std::map<std::string, double> got_obj;
    for (const auto& t : m.objective_linear) {
      want_obj[m.variables[t.var].name] += t.coef;
    }
    for (const auto& t : back.objective_linear) {
      got_obj[back.variables[t.var].name] += t.coef;
    }
    EXPECT_EQ(got_obj, want_obj) << name;
    ASSERT_EQ(back.objective_quadratic.size(), m.objective_quadratic.size()) << name;
    for (std::size_t q = 0; q < m.objective_quadratic.size(); ++q) {
      EXPECT_DOUBLE_EQ(back.objective_quadratic[q].coef, m.objective_quadratic[q].coef);
    }
  }
}

TEST(LpReader, RejectsBadNames) {
  const std::string head = "Minimize\n obj: ";
  EXPECT_THROW((void)parse_lp(head + "2 1x\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp(head + "2 .x\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp(head + "2 e7x\nEnd\n"), ParseError);
  EXPECT_NO_THROW((void)parse_lp(head + "2 x_1.a\nEnd\n"));
}

TEST(LpReader, RejectsStructuralErrors) {
  EXPECT_THROW((void)parse_lp("Subject To\n c: x >= 1\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: x\nBounds\n x <= 3\nSubject To\n c: x >= 1\nEnd\n"),
               ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: [ 2 x ^ 2 ]\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: x\n"), ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: x y\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: x\nSubject To\n c: x >=\nEnd\n"), ParseError);
  EXPECT_THROW((void)parse_lp("Minimize\n obj: x\nEnd\nx\n"), ParseError);
}

TEST(LpReader, RejectsLongLines) {
  const std::string name(300, 'x');
  try {
    (void)parse_lp("Minimize\n obj: " + name + "\nEnd\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.context(), "line 2");
  }
}

TEST(LpReader, ReadsHandWrittenModel) {
  const MilpModel m = parse_lp(
      "\\ tiny\n"
      "Minimize\n"
      " obj: 3 x - 2 y + [ 4 x ^ 2 + 2 x * y ] / 2\n"
      "Subject To\n"
      " c1: x + y >= 1\n"
      " c2: x - y = 0\n"
      "Bounds\n"
      " -1 <= x <= 4\n"
      " y free\n"
      "Binary\n"
      " z\n"
      "End\n");
  ASSERT_EQ(m.variables.size(), 3u);
  EXPECT_EQ(m.variables[m.at("x")].lower, -1.0);
  EXPECT_TRUE(std::isinf(m.variables[m.at("y")].lower));
  EXPECT_EQ(m.variables[m.at("z")].kind, VarKind::Binary);
  ASSERT_EQ(m.objective_quadratic.size(), 2u);
  EXPECT_EQ(m.objective_quadratic[0].coef, 2.0);
  EXPECT_EQ(m.objective_quadratic[1].coef, 1.0);
  ASSERT_EQ(m.constraints.size(), 2u);
  EXPECT_EQ(m.constraints[1].sense, Sense::EQ);
}
