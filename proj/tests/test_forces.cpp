// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "runsafe/forces.hpp"
#include "runsafe/presets.hpp"

using namespace runsafe;

TEST(Thrust, StaticAndLapse) {
    AircraftParams a;
    EXPECT_DOUBLE_EQ(thrust_force(0.0, 1.0, a), 240000.0);
    EXPECT_DOUBLE_EQ(thrust_force(50.0, 1.0, a), 220000.0);
    EXPECT_DOUBLE_EQ(thrust_force(0.0, 0.0, a), 8000.0);
}

TEST(Thrust, FloorsAtHalfStatic) {
    AircraftParams a;
    EXPECT_DOUBLE_EQ(thrust_force(1000.0, 1.0, a), 120000.0);
}

TEST(Drag, DirectEvaluation) {
    AircraftParams a;
    AtmosphereParams atm;
    EXPECT_DOUBLE_EQ(drag_force(0.0, atm, a), 0.0);
    // 0.5 * 1.225 * 60^2 * 124.6 * 0.08 evaluated offline.
    EXPECT_NEAR(drag_force(60.0, atm, a), 21979.44, 1e-6);
    EXPECT_NEAR(drag_force(120.0, atm, a), 4.0 * drag_force(60.0, atm, a), 1e-6);
    EXPECT_DOUBLE_EQ(drag_force(-5.0, atm, a), 0.0);
}

TEST(Friction, ZeroLiftCases) {
    AircraftParams a;
    AtmosphereParams atm;
    RunwayParams rwy;
    EXPECT_NEAR(friction_force(0.0, false, atm, a, rwy), 13729.31, 1e-6);
    EXPECT_NEAR(friction_force(0.0, true, atm, a, rwy), 274586.2, 1e-6);
}

TEST(Friction, VanishesWhenLiftCarriesWeight) {
    AircraftParams a;
    AtmosphereParams atm;
    RunwayParams rwy;
    const double v = std::sqrt(a.mass * atm.gravity / (0.5 * atm.air_density * a.wing_area * a.lift_coefficient_ground));
    EXPECT_NEAR(friction_force(v, true, atm, a, rwy), 0.0, 1e-6);
    EXPECT_DOUBLE_EQ(friction_force(v * 1.2, false, atm, a, rwy), 0.0);
}

TEST(Friction, HeadwindAddsLift) {
    AircraftParams a;
    AtmosphereParams atm;
    RunwayParams calm;
    RunwayParams windy;
    windy.headwind = 10.0;
    EXPECT_LT(friction_force(40.0, false, atm, a, windy), friction_force(40.0, false, atm, a, calm));
}

TEST(Slope, SmallAngle) {
    AircraftParams a;
    RunwayParams rwy;
    EXPECT_DOUBLE_EQ(slope_gravity_force(a, rwy), 0.0);
    rwy.slope = 0.01;
    // 70000 * 9.80665 * sin(0.01), evaluated offline.
    EXPECT_NEAR(slope_gravity_force(a, rwy), 6864.5406, 1e-3);
    rwy.slope = -0.01;
    EXPECT_NEAR(slope_gravity_force(a, rwy), -6864.5406, 1e-3);
}

TEST(NetAcceleration, ThrustOnly) {
    AircraftParams a;
    a.rolling_friction_mu = 0.0;
    a.drag_coefficient_ground = 0.0;
    EXPECT_NEAR(net_acceleration(0.0, 1.0, false, a, {}, {}), 240000.0 / 70000.0, 1e-12);
    EXPECT_NEAR(net_acceleration(0.0, 1.0, false, a, {}, {}), 3.4286, 1e-4);
}

TEST(NetAcceleration, IdleAtRestIsNonPositive) {
    AircraftParams a;
    a.idle_thrust = 0.0;
    EXPECT_LE(net_acceleration(0.0, 0.0, false, a, {}, {}), 0.0);
}

TEST(NetAcceleration, ComposesForceOperations) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        AircraftParams a;
        a.mass = 40000.0 + 50000.0 * u(rng);
        a.drag_coefficient_ground = 0.05 + 0.1 * u(rng);
        a.lift_coefficient_ground = 0.3 + 0.8 * u(rng);
        RunwayParams r;
        r.slope = -0.02 + 0.04 * u(rng);
        r.headwind = -10.0 + 25.0 * u(rng);
        AtmosphereParams atm;
        atm.air_density = 0.9 + 0.4 * u(rng);
        const double v = 90.0 * u(rng);
        const double thr = u(rng);
        const bool brk = u(rng) < 0.5;
        const double airspeed = v + r.headwind;
        const double expected = (thrust_force(v, thr, a) - drag_force(airspeed, atm, a) -
                                 friction_force(v, brk, atm, a, r) - slope_gravity_force(a, r, atm)) /
                                a.mass;
        ASSERT_NEAR(net_acceleration(v, thr, brk, a, r, atm), expected, 1e-12);
    }
}

TEST(Validation, ReportsEveryBadField) {
    AircraftParams a;
    a.mass = -1.0;
    a.wing_area = 0.0;
    const auto errors = validate(a);
    ASSERT_GE(errors.size(), 2u);
    EXPECT_EQ(errors[0].field, "aircraft.mass");
}

TEST(FlapDetent, StringRoundTrip) {
    for (auto d : {FlapDetent::F1, FlapDetent::F5, FlapDetent::F10, FlapDetent::F15, FlapDetent::F25,
                   FlapDetent::F30, FlapDetent::F40}) {
        EXPECT_EQ(flap_detent_from_string(to_string(d)), d);
    }
    EXPECT_THROW(flap_detent_from_string("7"), ValidationError);
}

TEST(Preset, JsonRoundTrip) {
    const AircraftPreset p = b737_800();
    nlohmann::json j = to_json(p);
    const AircraftPreset q = preset_from_json(j);
    EXPECT_EQ(q.name, p.name);
    EXPECT_DOUBLE_EQ(q.configured(FlapDetent::F30).drag_coefficient_ground,
                     p.configured(FlapDetent::F30).drag_coefficient_ground);
    EXPECT_DOUBLE_EQ(q.autobrake(AutobrakeDetent::Max), 3.0);
}
