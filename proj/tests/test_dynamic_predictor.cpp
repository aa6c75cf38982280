// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "runsafe/dynamic_predictor.hpp"

using namespace runsafe;

namespace {

TakeoffConfig synthetic_takeoff() {
    TakeoffConfig cfg;
    cfg.v1 = 55.0;
    cfg.vr = 58.0;
    cfg.v2 = 63.0;
    return cfg;
}

IntegratorConfig no_reaction() {
    IntegratorConfig ic;
    ic.reaction_time_at_v1 = 0.0;
    return ic;
}

// a(t) = -0.04 t + 2.2 from rest at t = 0, full throttle, brakes off.
TelemetryFrame synthetic_roll_frame(double t) {
    TelemetryFrame f;
    f.timestamp = t;
    f.acceleration = -0.04 * t + 2.2;
    f.ground_speed = -0.02 * t * t + 2.2 * t;
    f.distance_along_runway = -0.02 / 3.0 * t * t * t + 1.1 * t * t;
    f.throttle_fraction = 1.0;
    return f;
}

TelemetryFrame airborne(double t, double h, double vs, double gs, double x) {
    TelemetryFrame f;
    f.timestamp = t;
    f.height_agl = h;
    f.vertical_speed = vs;
    f.ground_speed = gs;
    f.distance_along_runway = x;
    f.on_ground = false;
    return f;
}

}  // namespace

TEST(TakeoffStart, LatchesOnFirstNonIdleFrame) {
    TakeoffStartDetector d;
    TelemetryFrame f;
    f.throttle_fraction = 0.05;
    EXPECT_FALSE(d.detect(f));
    EXPECT_FALSE(d.started());
    f.throttle_fraction = 0.8;
    EXPECT_TRUE(d.detect(f));
    EXPECT_TRUE(d.started());
    EXPECT_FALSE(d.detect(f));
    f.throttle_fraction = 0.0;
    EXPECT_FALSE(d.detect(f));
    EXPECT_TRUE(d.started());
}

TEST(TakeoffPredictor, NothingBeforeStart) {
    TakeoffPredictor p(synthetic_takeoff(), no_reaction());
    TelemetryFrame f;
    const auto r = p.step(f);
    EXPECT_FALSE(r.snapshot.has_value());
    EXPECT_FALSE(p.started());
}

TEST(TakeoffPredictor, SeedingReportsStaticFigure) {
    TakeoffPredictor p(synthetic_takeoff(), no_reaction());
    StepResult r;
    for (int n = 0; n <= 100; ++n) r = p.step(synthetic_roll_frame(n * 0.05));
    ASSERT_TRUE(r.snapshot);
    EXPECT_EQ(r.snapshot->confidence, Confidence::Seeding);
    EXPECT_DOUBLE_EQ(r.snapshot->dynamic_required_distance, p.static_result().total);
    EXPECT_DOUBLE_EQ(r.snapshot->delta_from_static, 0.0);
}

TEST(TakeoffPredictor, LinearAccelerationMatchesClosedForm) {
    // v(t) = -0.02 t^2 + 2.2 t reaches 55 at t = 38.4169, having covered
    // 1245.4567 m (closed form of the cubic position).
    TakeoffPredictor p(synthetic_takeoff(), no_reaction());
    const double allowance = p.static_result().segments.back().distance;
    bool seeded_event = false;
    StepResult r;
    for (int n = 0; n <= 600; ++n) {
        r = p.step(synthetic_roll_frame(n * 0.05));
        seeded_event = seeded_event || r.events.seed_complete;
        if (p.seeded()) {
            ASSERT_TRUE(r.snapshot);
            EXPECT_NEAR(r.snapshot->dynamic_required_distance - allowance, 1245.4567, 1.0) << "t=" << n * 0.05;
        }
    }
    EXPECT_TRUE(seeded_event);
    const auto m = p.acceleration_model();
    ASSERT_TRUE(m);
    EXPECT_NEAR(m->alpha, -0.04, 1e-6);
    EXPECT_NEAR(m->beta, 2.2, 1e-4);
    EXPECT_EQ(r.snapshot->confidence, Confidence::Converged);
}

TEST(TakeoffPredictor, RejectedTakeoffConstantDeceleration) {
    TakeoffPredictor p(synthetic_takeoff(), no_reaction());
    TelemetryFrame go;
    go.throttle_fraction = 1.0;
    p.step(go);

    const double t0 = 1.0;
    const double x0 = 500.0;
    StepResult r;
    bool detected = false;
    bool stopped = false;
    for (int n = 0;; ++n) {
        const double tau = n * 0.05;
        TelemetryFrame f;
        f.timestamp = t0 + tau;
        f.ground_speed = std::max(65.0 - 3.0 * tau, 0.0);
        f.acceleration = -3.0;
        f.distance_along_runway = x0 + 65.0 * tau - 1.5 * tau * tau;
        f.brakes_applied = true;
        f.throttle_fraction = 0.0;
        r = p.step(f);
        detected = detected || r.events.rto_detected;
        ASSERT_TRUE(r.snapshot);
        EXPECT_EQ(r.snapshot->procedure_stage, ProcedureStage::RtoBraking);
        stopped = stopped || r.events.stopped;
        // The three-term fit needs some spread in tau before the prior washes out.
        if (tau >= 1.0 && f.ground_speed > 0.1) {
            EXPECT_NEAR(r.snapshot->stop_position, x0 + 65.0 * 65.0 / 6.0, 1.0) << "tau=" << tau;
        }
        if (f.ground_speed <= 0.0) break;
    }
    EXPECT_TRUE(detected);
    EXPECT_TRUE(stopped);
    EXPECT_DOUBLE_EQ(r.snapshot->stop_position, r.snapshot->position);
}

TEST(LandingStage, Detection) {
    EXPECT_FALSE(detect_landing_stage(airborne(0, 120.0, -3, 70, 0)).has_value());
    EXPECT_EQ(detect_landing_stage(airborne(0, 91.44, -3, 70, 0)), ProcedureStage::PreApproach);
    EXPECT_EQ(detect_landing_stage(airborne(0, 10.0, -3, 70, 0)), ProcedureStage::Approach);
    EXPECT_EQ(detect_landing_stage(airborne(0, 3.0, -1, 70, 0)), ProcedureStage::Flare);
    TelemetryFrame g;
    g.on_ground = true;
    EXPECT_EQ(detect_landing_stage(g), ProcedureStage::FreeRoll);
    g.brakes_applied = true;
    EXPECT_EQ(detect_landing_stage(g), ProcedureStage::LandingBraking);
}

TEST(LandingPredictor, PreApproachRemainingAirDistance) {
    LandingConfig cfg;
    LandingPredictor p(cfg);
    StepResult r;
    for (int n = 0; n < 40; ++n) r = p.step(airborne(n * 0.05, 45.0, -3.0, 70.0, -800.0));
    ASSERT_TRUE(r.snapshot);
    EXPECT_EQ(r.snapshot->procedure_stage, ProcedureStage::PreApproach);
    EXPECT_EQ(r.snapshot->confidence, Confidence::Converged);
    const double decel = effective_autobrake_decel(cfg);
    const double downstream = flare_distance(70.0, cfg.flare_duration) +
                              free_roll_distance(70.0, cfg.free_roll_duration) +
                              braking_distance(kTouchdownSpeedFraction * 70.0, decel);
    const double air = r.snapshot->stop_position - r.snapshot->position - approach_distance(cfg.glide_path) -
                       downstream;
    EXPECT_NEAR(air, 694.4, 0.01);
}

TEST(LandingPredictor, LevelFlightHoldsLastEstimate) {
    LandingConfig cfg;
    LandingPredictor p(cfg);
    StepResult r = p.step(airborne(0.0, 45.0, 0.0, 70.0, -800.0));
    ASSERT_TRUE(r.snapshot);
    EXPECT_TRUE(r.events.below_300ft);
    EXPECT_EQ(r.snapshot->confidence, Confidence::Converging);
    EXPECT_DOUBLE_EQ(r.snapshot->stop_position, p.static_result().total);
}

TEST(LandingPredictor, FreeRollExample) {
    LandingConfig cfg;
    LandingPredictor p(cfg);
    TelemetryFrame f;
    f.on_ground = true;
    f.ground_speed = 62.0;
    f.distance_along_runway = 400.0;
    StepResult r;
    for (int n = 0; n <= 40; ++n) {
        f.timestamp = n * 0.05;
        r = p.step(f);
        if (n == 0) {
            EXPECT_TRUE(r.events.touchdown);
            EXPECT_TRUE(r.events.below_300ft);
        }
    }
    ASSERT_TRUE(r.snapshot);
    EXPECT_EQ(r.snapshot->procedure_stage, ProcedureStage::FreeRoll);
    const double roll = r.snapshot->stop_position - 400.0 - braking_distance(62.0, effective_autobrake_decel(cfg));
    EXPECT_NEAR(roll, 93.0, 1e-9);
}

TEST(LandingPredictor, BrakingFitAndStop) {
    LandingConfig cfg;
    LandingPredictor p(cfg);
    const double x0 = 600.0;
    StepResult r;
    bool braking_event = false;
    bool stopped = false;
    for (int n = 0;; ++n) {
        const double tau = n * 0.05;
        TelemetryFrame f;
        f.timestamp = 10.0 + tau;
        f.on_ground = true;
        f.brakes_applied = true;
        f.ground_speed = std::max(60.0 - 2.0 * tau, 0.0);
        f.distance_along_runway = x0 + 60.0 * tau - tau * tau;
        r = p.step(f);
        braking_event = braking_event || r.events.braking_started;
        stopped = stopped || r.events.stopped;
        ASSERT_TRUE(r.snapshot);
        if (tau >= 1.0 && f.ground_speed > 0.1) {
            EXPECT_NEAR(r.snapshot->stop_position, x0 + 900.0, 1.0) << "tau=" << tau;
        }
        if (f.ground_speed <= 0.0) break;
    }
    EXPECT_TRUE(braking_event);
    EXPECT_TRUE(stopped);
    EXPECT_NEAR(r.snapshot->stop_position, x0 + 900.0, 1e-6);
    EXPECT_EQ(r.snapshot->confidence, Confidence::Converged);
}

TEST(LandingPredictor, StagesNeverRegress) {
    LandingConfig cfg;
    LandingPredictor p(cfg);
    p.step(airborne(0.0, 10.0, -3.0, 70.0, 0.0));
    ASSERT_EQ(p.stage(), ProcedureStage::Approach);
    p.step(airborne(0.05, 20.0, -3.0, 70.0, 3.0));
    EXPECT_EQ(p.stage(), ProcedureStage::Approach);
}
