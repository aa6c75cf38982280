// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "runsafe/errors.hpp"
#include "runsafe/estimators.hpp"
#include "runsafe/eval.hpp"
#include "runsafe/flight_sim.hpp"

using namespace runsafe;

namespace {

Scenario takeoff(ScenarioKind kind) {
    Scenario s = base_scenario(Procedure::Takeoff);
    s.kind = kind;
    return s;
}

}  // namespace

TEST(SimStep, RestingAircraftStaysPut) {
    GroundRoll roll;
    SimState s;
    s.throttle = 0.0;
    for (int i = 0; i < 1000; ++i) s = step(s, 0.005, roll);
    EXPECT_DOUBLE_EQ(s.speed, 0.0);
    EXPECT_DOUBLE_EQ(s.position, 0.0);
}

TEST(SimStep, BrakingNeverReversesDirection) {
    GroundRoll roll;
    SimState s;
    s.speed = 0.3;
    s.braking = true;
    for (int i = 0; i < 200; ++i) {
        const double before = s.position;
        s = step(s, 0.01, roll);
        EXPECT_GE(s.speed, 0.0);
        EXPECT_GE(s.position, before);
    }
    EXPECT_DOUBLE_EQ(s.speed, 0.0);
}

TEST(FlightSim, DeterministicForSeed) {
    Scenario s = takeoff(ScenarioKind::NormalTakeoff);
    s.noise_std = NoiseStd::defaults();
    s.noise_seed = 42;
    const auto a = run_scenario(s);
    const auto b = run_scenario(s);
    ASSERT_EQ(a.frames.size(), b.frames.size());
    EXPECT_TRUE(a.frames == b.frames);
    s.noise_seed = 43;
    const auto c = run_scenario(s);
    EXPECT_FALSE(a.frames == c.frames);
    // Noise touches the emitted frames only, never the physics.
    EXPECT_DOUBLE_EQ(*a.truth.liftoff_position, *c.truth.liftoff_position);
}

TEST(FlightSim, TakeoffPhasesAndDecreasingAcceleration) {
    const auto run = run_scenario(takeoff(ScenarioKind::NormalTakeoff));
    const auto& t = run.truth;
    ASSERT_TRUE(t.v1_time && t.liftoff_time);
    EXPECT_GT(t.brake_release_time, t.throttle_up_time);
    EXPECT_GT(*t.v1_time, t.brake_release_time);
    EXPECT_GT(*t.liftoff_time, *t.v1_time);
    EXPECT_FALSE(t.rto_time);

    std::vector<TimedSample> roll;
    for (const auto& f : run.frames) {
        if (f.timestamp > t.brake_release_time + 1.0 && f.on_ground && f.ground_speed > 5.0) {
            roll.push_back({f.timestamp, f.acceleration});
        }
    }
    ASSERT_GT(roll.size(), 100u);
    EXPECT_LT(fit_linear_seed(roll).alpha, 0.0);
}

TEST(FlightSim, PositionIsIntegralOfSpeed) {
    const auto run = run_scenario(takeoff(ScenarioKind::NormalTakeoff));
    for (std::size_t i = 1; i < run.frames.size(); ++i) {
        const auto& a = run.frames[i - 1];
        const auto& b = run.frames[i];
        if (!a.on_ground || !b.on_ground) continue;
        const double dt = b.timestamp - a.timestamp;
        const double trapezoid = 0.5 * (a.ground_speed + b.ground_speed) * dt;
        EXPECT_NEAR(b.distance_along_runway - a.distance_along_runway, trapezoid, 0.05) << "t=" << b.timestamp;
    }
}

TEST(FlightSim, FrameClockIsRegular) {
    const auto run = run_scenario(takeoff(ScenarioKind::NormalTakeoff));
    for (std::size_t i = 1; i < run.frames.size(); ++i) {
        EXPECT_NEAR(run.frames[i].timestamp - run.frames[i - 1].timestamp, 0.05, 1e-9);
    }
}

TEST(FlightSim, RejectionAtV1MatchesStaticAsdr) {
    Scenario s = takeoff(ScenarioKind::RtoAtSpeed);
    s.rto_speed = s.takeoff.v1;
    const auto run = run_scenario(s);
    ASSERT_TRUE(run.truth.accelerate_stop_distance);
    IntegratorConfig ic;
    ic.reaction_time_at_v1 = 0.0;
    const double asdr = compute_asdr(s.takeoff, ic).total;
    EXPECT_NEAR(*run.truth.accelerate_stop_distance / asdr, 1.0, 0.005);
    EXPECT_FALSE(run.truth.liftoff_time);
    EXPECT_DOUBLE_EQ(run.frames.back().ground_speed, 0.0);
}

TEST(FlightSim, ThrustLossLengthensRoll) {
    const auto normal = run_scenario(takeoff(ScenarioKind::NormalTakeoff));
    Scenario s = takeoff(ScenarioKind::ThrustLossAt);
    s.thrust_loss_time = 10.0;
    s.thrust_loss_fraction = 0.3;
    const auto weak = run_scenario(s);
    ASSERT_TRUE(weak.truth.liftoff_position);
    EXPECT_GT(*weak.truth.liftoff_position, *normal.truth.liftoff_position);
}

TEST(FlightSim, LandingTruthAndStaticConservatism) {
    const Scenario s = base_scenario(Procedure::Landing);
    const auto run = run_scenario(s);
    const auto& t = run.truth;
    ASSERT_TRUE(t.threshold_time && t.touchdown_time && t.braking_time && t.stop_time && t.landing_distance);
    EXPECT_LT(*t.threshold_time, *t.touchdown_time);
    EXPECT_LT(*t.touchdown_time, *t.braking_time);
    EXPECT_LT(*t.braking_time, *t.stop_time);
    EXPECT_NEAR(*t.landing_distance, *t.stop_position - *t.threshold_position, 1e-9);
    EXPECT_GE(compute_ldr(s.landing).total, *t.landing_distance);
    EXPECT_GT(run.frames.front().height_agl, kPreApproachTopHeight);
}

TEST(FlightSim, ImpossibleScenarioIsInfeasible) {
    Scenario s = takeoff(ScenarioKind::NormalTakeoff);
    s.takeoff.aircraft.mass = 900000.0;
    s.max_time = 60.0;
    try {
        run_scenario(s);
        FAIL() << "expected ScenarioInfeasible";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScenarioInfeasible);
    }
}

TEST(FlightSim, Validation) {
    Scenario s = takeoff(ScenarioKind::NormalTakeoff);
    EXPECT_TRUE(validate(s).empty());
    s.frame_rate = 500.0;
    EXPECT_FALSE(validate(s).empty());
}

TEST(Encoding, FewerChannelsGiveFewerRecords) {
    TelemetryFrame f;
    f.ground_speed = 10.0;
    const auto full = records_from_frame(f, ChannelMapping::defaults());
    ChannelMapping narrow = ChannelMapping::defaults();
    narrow.time.reset();
    for (ChannelSlot* slot : {&narrow.ground_speed, &narrow.vertical_speed, &narrow.height_agl,
                              &narrow.distance_along_runway, &narrow.acceleration, &narrow.throttle,
                              &narrow.on_ground, &narrow.brakes}) {
        slot->index = 3;
    }
    narrow.ground_speed.slot = 0;
    narrow.vertical_speed.slot = 1;
    narrow.height_agl.slot = 2;
    narrow.distance_along_runway.slot = 3;
    narrow.acceleration.slot = 4;
    narrow.throttle.slot = 5;
    narrow.on_ground.slot = 6;
    narrow.brakes.slot = 7;
    const auto one = records_from_frame(f, narrow);
    EXPECT_EQ(one.size(), 1u);
    EXPECT_LT(one.size(), full.size());
    EXPECT_EQ(encode_datagram(one).size(), kPrologueSize + kRecordSize);
    EXPECT_FLOAT_EQ(one[0].values[0], static_cast<float>(10.0 / kKnotsToMps));
}

TEST(ScenarioJson, RoundTrip) {
    Scenario s = takeoff(ScenarioKind::ThrustLossAt);
    s.thrust_loss_time = 7.0;
    s.thrust_loss_fraction = 0.5;
    s.noise_std = NoiseStd::defaults();
    const auto j = to_json(s);
    const auto back = scenario_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.kind, ScenarioKind::ThrustLossAt);
}
