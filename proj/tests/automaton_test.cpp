#include <gtest/gtest.h>

#include "chargenet/automaton.hpp"
#include "support.hpp"

using namespace chargenet;
using chargenet::testing::fixture;

namespace {

DiscreteInput drive_on(NodeId i, NodeId j, std::size_t n) {
  return DiscreteInput{false, false, edge_index(i, j, n)};
}

DiscreteInput wait_on(EdgeIndex kept) { return DiscreteInput{true, false, kept}; }
DiscreteInput charge_on(EdgeIndex kept) { return DiscreteInput{true, true, kept}; }

struct Pair {
  HighwayGraph graph{2};
  VehicleParams vp;

  Pair() {
    graph.set_station(1, 1);
    graph.set_station(2, 1);
    graph.add_road(1, 2, 25, 25, 2);
    vp.battery = BatteryParams(4, 40, 32, 30, 1.5);
    vp.motion.base_speed = 10;
    vp.motion.t_s = 10;
    vp.motion.d_max = 100;
    vp.motion.drive_power = 18;
  }

  [[nodiscard]] WorldContext context() const { return WorldContext::fresh(graph); }
};

}  // namespace

TEST(ModeSelect, MapsInputsToModes) {
  EXPECT_EQ(mode_select({true, true, {}}), Mode::Charging);
  EXPECT_EQ(mode_select({true, false, {}}), Mode::Waiting);
  EXPECT_EQ(mode_select({false, false, {}}), Mode::Driving);
}

TEST(Inputs, OrderIsDriveThenWaitThenCharge) {
  const EdgeIndex h{3};
  EXPECT_LT(drive_on(1, 2, 2), wait_on(h));
  EXPECT_LT(wait_on(h), charge_on(h));
}

TEST(Inputs, OneHotHasSingleEntry) {
  const auto v = one_hot(drive_on(2, 1, 3), 3);
  EXPECT_EQ(std::count(v.begin(), v.end(), true), 1);
  EXPECT_TRUE(v[edge_index(2, 1, 3).value - 1]);
  EXPECT_EQ(parked_at(2, 3), edge_index(2, 2, 3));
}

TEST(Events, FlagsFollowPosition) {
  const Pair w;
  VehicleState s;
  s.position = Position::at(1);
  EXPECT_EQ(event_generator(s, w.graph), EventFlags{});
  s.position = Position::edge(1, 2);
  s.edge_progress = 10;
  EXPECT_EQ(event_generator(s, w.graph), (EventFlags{false, true}));
  s.edge_progress = 25;
  EXPECT_EQ(event_generator(s, w.graph), (EventFlags{true, false}));
}

TEST(Simulate, TwoNodeDriveByHand) {
  const ScheduleProblem p = fixture("two_node");
  const Plan plan{{drive_on(1, 2, 2), drive_on(1, 2, 2), drive_on(1, 2, 2)}};
  const TrajectorySet t =
      simulate_execution(p.initial_starts(), plan, p.initial_context(), p.vehicle);
  const auto& s = t.cars[0].states;
  ASSERT_EQ(s.size(), 4u);
  // 10 miles and 3 kWh per step; the third step lands on node 2 after 5 miles.
  EXPECT_EQ(s[1].position, Position::edge(1, 2));
  EXPECT_EQ(s[1].edge_progress, 10.0);
  EXPECT_EQ(s[1].energy, 17.0);
  EXPECT_EQ(s[2].edge_progress, 20.0);
  EXPECT_EQ(s[2].trip_distance, 20.0);
  EXPECT_EQ(s[2].energy, 14.0);
  EXPECT_EQ(s[3].position, Position::at(2));
  EXPECT_EQ(s[3].edge_progress, 0.0);
  EXPECT_EQ(s[3].trip_distance, 25.0);
  EXPECT_EQ(s[3].energy, 11.0);
  EXPECT_EQ(s[3].mode, Mode::Driving);
  EXPECT_TRUE(reaches_goals(p, t));
}

TEST(Simulate, IsDeterministic) {
  const ScheduleProblem p = fixture("five_node");
  const std::size_t n = p.graph.size();
  const Plan plan{
      {drive_on(1, 2, n), drive_on(2, 4, n), drive_on(2, 4, n), drive_on(4, 5, n),
       wait_on(edge_index(4, 5, n)), wait_on(edge_index(4, 5, n))},
      {charge_on(parked_at(2, n)), drive_on(2, 4, n), drive_on(2, 4, n),
       wait_on(edge_index(2, 4, n)), wait_on(edge_index(2, 4, n)), wait_on(edge_index(2, 4, n))}};
  const auto a = simulate_execution(p.initial_starts(), plan, p.initial_context(), p.vehicle);
  const auto b = simulate_execution(p.initial_starts(), plan, p.initial_context(), p.vehicle);
  EXPECT_EQ(a, b);
  EXPECT_EQ(p.evaluate(a), p.evaluate(b));
}

TEST(Successors, MidEdgeOnlyKeepsDriving) {
  const Pair w;
  VehicleState s;
  s.energy = 20;
  s.position = Position::edge(1, 2);
  s.edge_progress = 10;
  s.mode = Mode::Driving;
  const auto moves = successors(s, w.context(), drive_on(1, 2, 2), w.vp);
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(moves[0].input, drive_on(1, 2, 2));
  EXPECT_THROW(transition(s, wait_on(edge_index(1, 2, 2)), w.context(), drive_on(1, 2, 2), w.vp),
               ContractViolation);
}

TEST(Successors, ParkedCarSortedAndKeepsEdge) {
  const Pair w;
  const CarStart start = CarStart::parked(1, 20, 2);
  const auto moves = successors(start.state, w.context(), start.previous, w.vp);
  ASSERT_EQ(moves.size(), 3u);
  EXPECT_EQ(moves[0].input, drive_on(1, 2, 2));
  EXPECT_EQ(moves[1].input, wait_on(parked_at(1, 2)));
  EXPECT_EQ(moves[2].input, charge_on(parked_at(1, 2)));
  EXPECT_EQ(moves[2].next.energy, 25.0);
  EXPECT_EQ(moves[2].next.mode, Mode::Charging);
}

TEST(Successors, DriveThatWouldStrandIsNotOffered) {
  const Pair w;
  const CarStart start = CarStart::parked(1, 5, 2);
  const auto inputs = admissible_inputs(start.state, w.context(), start.previous, w.vp);
  EXPECT_EQ(inputs, (std::vector<DiscreteInput>{wait_on(parked_at(1, 2)), charge_on(parked_at(1, 2))}));
}

TEST(Successors, TripDistanceBoundIsStrict) {
  Pair w;
  w.graph.remove_arc(1, 2);
  w.graph.remove_arc(2, 1);
  w.graph.add_road(1, 2, 10, 10, 2);
  w.vp.motion.d_max = 10;
  const CarStart start = CarStart::parked(1, 20, 2);
  const auto inputs = admissible_inputs(start.state, w.context(), start.previous, w.vp);
  ASSERT_FALSE(inputs.empty());
  EXPECT_TRUE(inputs.front().gamma) << "arriving with d == d_max must be rejected";
  w.vp.motion.d_max = 10.5;
  EXPECT_FALSE(admissible_inputs(start.state, w.context(), start.previous, w.vp).front().gamma);
}

TEST(Capacity, SecondChargerIsRejectedWithCarId) {
  const Pair w;
  const std::vector<CarStart> starts{CarStart::parked(1, 20, 2), CarStart::parked(1, 20, 2)};
  const Plan plan{{charge_on(parked_at(1, 2))}, {charge_on(parked_at(1, 2))}};
  try {
    (void)simulate_execution(starts, plan, w.context(), w.vp);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.car(), 2u);
    EXPECT_EQ(e.step(), 0u);
    EXPECT_NE(std::string(e.what()).find("station 1 is at capacity"), std::string::npos);
  }
}

TEST(Capacity, NewcomerWaitsOneStepAfterFullStation) {
  const Pair w;
  const std::vector<CarStart> starts{CarStart::parked(1, 20, 2), CarStart::parked(1, 20, 2)};
  const EdgeIndex h = parked_at(1, 2);
  const Plan blocked{{charge_on(h), wait_on(h)}, {wait_on(h), charge_on(h)}};
  try {
    (void)simulate_execution(starts, blocked, w.context(), w.vp);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.car(), 2u);
    EXPECT_EQ(e.step(), 1u);
  }
  const Plan later{{charge_on(h), wait_on(h), wait_on(h)}, {wait_on(h), wait_on(h), charge_on(h)}};
  EXPECT_NO_THROW((void)simulate_execution(starts, later, w.context(), w.vp));
  const Plan continuing{{charge_on(h), charge_on(h)}, {wait_on(h), wait_on(h)}};
  EXPECT_NO_THROW((void)simulate_execution(starts, continuing, w.context(), w.vp));
}

TEST(Capacity, BlockedChargersCountAgainstCapacity) {
  const Pair w;
  WorldContext ctx = w.context();
  ctx.blocked[0] = 1;
  const CarStart start = CarStart::parked(1, 20, 2);
  const auto inputs = admissible_inputs(start.state, ctx, start.previous, w.vp);
  EXPECT_EQ(std::count_if(inputs.begin(), inputs.end(), [](const auto& u) { return u.charge; }), 0);
}

TEST(Simulate, ReportsStepOfMidEdgeWait) {
  const ScheduleProblem p = fixture("two_node");
  const Plan plan{{drive_on(1, 2, 2), wait_on(edge_index(1, 2, 2)), drive_on(1, 2, 2)}};
  try {
    (void)simulate_execution(p.initial_starts(), plan, p.initial_context(), p.vehicle);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.car(), 1u);
    EXPECT_EQ(e.step(), 1u);
    EXPECT_NE(std::string(e.what()).find("mid-edge"), std::string::npos);
  }
}

TEST(Simulate, RejectsRaggedPlans) {
  const ScheduleProblem p = fixture("two_node");
  EXPECT_THROW((void)simulate_execution(p.initial_starts(), Plan{}, p.initial_context(), p.vehicle),
               ArgumentError);
}

TEST(Coupling, SpeedUsesPreviousStepFlow) {
  Pair w;
  w.vp.motion.congestion_coupling = true;
  const std::vector<CarStart> starts{CarStart::parked(1, 20, 2), CarStart::parked(1, 20, 2)};
  const Plan plan{{drive_on(1, 2, 2), drive_on(1, 2, 2)}, {drive_on(1, 2, 2), drive_on(1, 2, 2)}};
  const auto t = simulate_execution(starts, plan, w.context(), w.vp);
  // Empty road during step 0; two cars on it during step 1.
  EXPECT_DOUBLE_EQ(t.cars[0].states[1].edge_progress, 10.0);
  EXPECT_DOUBLE_EQ(t.cars[1].states[1].edge_progress, 10.0);
  EXPECT_DOUBLE_EQ(t.cars[0].states[2].edge_progress, 10.0 + 10.0 / 1.15);
}

TEST(Records, OneRowPerCarStep) {
  const ScheduleProblem p = fixture("two_node");
  const Plan plan{{drive_on(1, 2, 2), drive_on(1, 2, 2), drive_on(1, 2, 2)}};
  const auto t = simulate_execution(p.initial_starts(), plan, p.initial_context(), p.vehicle);
  const auto rows = trajectory_records(t);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].location, "edge:1->2");
  EXPECT_EQ(rows[2].location, "node:2");
  EXPECT_EQ(rows[2].edge, edge_index(1, 2, 2).value);
}
