#include <gtest/gtest.h>

#include <random>

#include "chargenet/vehicle.hpp"
#include "support.hpp"

using namespace chargenet;

namespace {

BatteryParams pack() { return BatteryParams(4, 40, 32, 30, 1.5, 1e-4, 1e-3, 1e-2); }

}  // namespace

TEST(Units, KwhFromKwAndMinutes) {
  EXPECT_EQ(kwh(18, 10), 3.0);
  EXPECT_EQ(kwh(60, 60), 60.0);
}

TEST(Battery, OffsetMeetsFlatPartAtKnee) {
  const BatteryParams bp = pack();
  EXPECT_DOUBLE_EQ(bp.chg_m(), 30 + 1.5 * 32);
  EXPECT_DOUBLE_EQ(charge_power(32, bp), 30.0);
  EXPECT_DOUBLE_EQ(charge_power(31.999999, bp), 30.0);
  EXPECT_NEAR(charge_power(32.000001, bp), 30.0, 1e-5);
  EXPECT_DOUBLE_EQ(charge_power(40, bp), 78 - 60.0);
}

TEST(Battery, RejectsInconsistentParameters) {
  EXPECT_THROW(BatteryParams(10, 40, 5, 30, 1.5), ValidationError);
  EXPECT_THROW(BatteryParams(4, 40, 32, 0, 1.5), ValidationError);
  EXPECT_THROW(BatteryParams(4, 40, 32, 30, 0), ValidationError);
  // Power would go negative before e_max.
  EXPECT_THROW(BatteryParams(4, 40, 32, 3, 1.5), ValidationError);
  EXPECT_NO_THROW(BatteryParams::with_offset(4, 40, 32, 30, 78, 1.5));
  EXPECT_THROW(BatteryParams::with_offset(4, 40, 32, 30, 80, 1.5), ValidationError);
}

TEST(ChargingTime, MatchesFineStepIntegration) {
  const BatteryParams bp = pack();
  const double t_s = 10.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> level(bp.e_min(), bp.e_max());
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = level(rng);
    double b = level(rng);
    if (a > b) {
      std::swap(a, b);
    }
    if (b - a < 1e-3) {
      b = std::min(bp.e_max(), a + 1.0);
    }
    const double closed = charging_time_closed_form(a, b, bp);
    const double numeric = chargenet::testing::euler_charging_minutes(a, b, bp, 1e-3 * t_s);
    worst = std::max(worst, std::abs(closed - numeric) / numeric);
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(ChargingTime, FlatPartIsLinear) {
  const BatteryParams bp = pack();
  // 15 kWh at 30 kW is half an hour.
  EXPECT_DOUBLE_EQ(charging_time_closed_form(10, 25, bp), 30.0);
  EXPECT_EQ(charging_time_closed_form(20, 20, bp), 0.0);
}

TEST(ChargingTime, TaperIsLogarithmic) {
  const BatteryParams bp = pack();
  const double hours = std::log((78 - 1.5 * 32) / (78 - 1.5 * 38)) / 1.5;
  EXPECT_NEAR(charging_time_closed_form(32, 38, bp), hours * 60, 1e-12);
}

TEST(ChargingTime, RejectsBadArguments) {
  const BatteryParams bp = pack();
  EXPECT_THROW(charging_time_closed_form(20, 10, bp), ArgumentError);
  EXPECT_THROW(charging_time_closed_form(2, 10, bp), DomainError);
  EXPECT_THROW(charging_time_closed_form(10, 41, bp), DomainError);
  // Power reaches zero exactly at e_max here.
  const BatteryParams tight(0, 20, 10, 10, 1);
  EXPECT_THROW(charging_time_closed_form(5, 20, tight), DomainError);
}

TEST(Degradation, MatchesHornerForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(0.0, 0.1);
  std::uniform_real_distribution<double> power(0.0, 150.0);
  std::uniform_real_distribution<double> minutes(0.0, 120.0);
  for (int i = 0; i < 200; ++i) {
    const double a = coef(rng);
    const double b = coef(rng);
    const double c = coef(rng);
    const BatteryParams bp(4, 40, 32, 30, 1.5, a, b, c);
    const double p = power(rng);
    const double t = minutes(rng);
    const double expected = t * (c + p * (b + p * a));
    ASSERT_NEAR(degradation_cost(p, t, bp), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(Degradation, RejectsNegativeInputs) {
  const BatteryParams bp = pack();
  EXPECT_THROW(degradation_cost(-1, 1, bp), ArgumentError);
  EXPECT_THROW(degradation_cost(1, -1, bp), ArgumentError);
  EXPECT_EQ(degradation_cost(10, 0, bp), 0.0);
}

TEST(StepEnergy, PerMode) {
  const BatteryParams bp = pack();
  MotionParams mp;
  mp.t_s = 10;
  VehicleState s;
  s.energy = 20;
  EXPECT_EQ(step_energy(s, Mode::Waiting, bp, mp, 18), 20.0);
  EXPECT_EQ(step_energy(s, Mode::Driving, bp, mp, 18), 17.0);
  EXPECT_EQ(step_energy(s, Mode::Charging, bp, mp, 0), 25.0);
  s.energy = 39;
  EXPECT_EQ(step_energy(s, Mode::Charging, bp, mp, 0), 40.0);
  s.energy = 5;
  EXPECT_THROW(step_energy(s, Mode::Driving, bp, mp, 18), DomainError);
  EXPECT_THROW(step_energy(s, Mode::Driving, bp, mp, -1), ArgumentError);
}

TEST(Velocity, ConstantWithoutCoupling) {
  HighwayGraph g(2);
  g.add_road(1, 2, 20, 30, 2);
  MotionParams mp;
  mp.base_speed = 7;
  EXPECT_EQ(incremental_velocity(g, 1, 2, 5, mp), 7.0);
  EXPECT_THROW(incremental_velocity(g, 1, 1, 0, mp), ArgumentError);
}

TEST(Velocity, CoupledFollowsTravelTime) {
  HighwayGraph g(2);
  g.add_road(1, 2, 20, 30, 2);
  MotionParams mp;
  mp.t_s = 10;
  mp.congestion_coupling = true;
  EXPECT_DOUBLE_EQ(incremental_velocity(g, 1, 2, 0, mp), 20.0 / 30.0 * 10.0);
  EXPECT_DOUBLE_EQ(incremental_velocity(g, 1, 2, 2, mp), 20.0 / (30.0 * 1.15) * 10.0);
  EXPECT_THROW(incremental_velocity(g, 1, 2, -1, mp), ArgumentError);
}

TEST(MotionParams, ReportsViolations) {
  HighwayGraph g(3);
  g.add_road(1, 2, 10, 10, 1);
  g.add_road(2, 3, 10, 10, 1);
  MotionParams mp;
  mp.d_max = 15;
  mp.drive_power = -1;
  mp.base_speed = 0;
  const auto v = mp.violations(&g);
  auto has = [&](const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); };
  EXPECT_TRUE(has("motion: base_speed must be positive"));
  EXPECT_TRUE(has("motion: drive_power must be nonnegative"));
  EXPECT_TRUE(has("motion: d_max shorter than the longest simple path"));
}

TEST(StateDomain, FlagsEachBrokenInvariant) {
  HighwayGraph g(2);
  g.add_road(1, 2, 10, 10, 1);
  const BatteryParams bp = pack();
  MotionParams mp;
  mp.d_max = 50;
  VehicleState s;
  s.energy = 20;
  s.position = Position::at(1);
  EXPECT_TRUE(state_violations(s, g, bp, mp).empty());
  s.energy = 50;
  s.trip_distance = 50;
  EXPECT_EQ(state_violations(s, g, bp, mp).size(), 2u);
}
