// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fsm_check.hpp"
#include "runsafe/procedure_fsm.hpp"

using namespace runsafe;

TEST(FsmGraph, TakeoffMatchesFixture) {
    const auto r = fsm_check::check_takeoff(fsm_check::load_fixture());
    EXPECT_EQ(r.pairs, kAllTakeoffStates.size() * kAllTakeoffEventKinds.size() * kAllSeverities.size());
    for (const auto& m : r.mismatches) ADD_FAILURE() << m;
}

TEST(FsmGraph, LandingMatchesFixture) {
    const auto r = fsm_check::check_landing(fsm_check::load_fixture());
    for (const auto& m : r.mismatches) ADD_FAILURE() << m;
}

TEST(FsmGraph, GoAroundUnreachableAfterTouchdown) { EXPECT_TRUE(fsm_check::go_around_unreachable_after_touchdown()); }

TEST(FsmGraph, CriticalRejectsInOneTransition) { EXPECT_TRUE(fsm_check::critical_rejects_in_one_transition()); }

TEST(FsmGraph, DocumentedExamples) {
    using K = TakeoffEvent::Kind;
    using L = LandingEvent::Kind;
    EXPECT_EQ(takeoff_transition(TakeoffState::Standby, {K::ThrottleUp}), TakeoffState::Calculating);
    EXPECT_EQ(takeoff_transition(TakeoffState::AsExpected, {K::RtoDetected}), TakeoffState::RtoInitiated);
    EXPECT_EQ(takeoff_transition(TakeoffState::TakeOff, {K::RtoDetected}), TakeoffState::RtoInitiated);
    EXPECT_EQ(landing_transition(LandingState::SystemReady, {L::Below300ft, Severity::Nominal}),
              LandingState::WithinLimits);
    EXPECT_EQ(landing_transition(LandingState::WithinLimits, {L::Severity, Severity::Critical}),
              LandingState::GoAround);
    EXPECT_EQ(landing_transition(LandingState::TdWithinLimits, {L::Severity, Severity::Critical}),
              LandingState::BrakeMore);
    EXPECT_EQ(color_of(TakeoffState::AsExpected), StatusColor::Green);
    EXPECT_EQ(color_of(TakeoffState::RtoMaxBrake), StatusColor::Red);
    EXPECT_EQ(color_of(TakeoffState::Calculating), StatusColor::Neutral);
}

TEST(FsmGraph, IllegalPairThrows) {
    try {
        takeoff_transition(TakeoffState::Standby, {TakeoffEvent::Kind::Stopped});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IllegalTransition);
    }
}

namespace {

PredictionSnapshot snap(double stop_position, double required) {
    PredictionSnapshot s;
    s.stop_position = stop_position;
    s.dynamic_required_distance = required;
    return s;
}

}  // namespace

TEST(Classify, DocumentedExamples) {
    const double L = 3000.0;
    const double stat = 1000.0;
    EXPECT_EQ(classify(snap(L - 300.0, 1010.0), stat, L), Severity::Nominal);
    EXPECT_EQ(classify(snap(L - 150.0, 1030.0), stat, L), Severity::Caution);
    EXPECT_EQ(classify(snap(L + 40.0, 1000.0), stat, L), Severity::Critical);
    EXPECT_EQ(classify(snap(L - 150.0, 970.0), stat, L), Severity::Caution);
    auto unreachable = snap(L - 500.0, 1000.0);
    unreachable.target_unreachable = true;
    EXPECT_EQ(classify(unreachable, stat, L), Severity::Critical);
}

TEST(Classify, BrakingSplit) {
    const double L = 3000.0;
    EXPECT_EQ(braking_severity(snap(L + 200.0, 1000.0), 1000.0, L), Severity::Caution);
    EXPECT_EQ(braking_severity(snap(L + 301.0, 1000.0), 1000.0, L), Severity::Critical);
    EXPECT_EQ(braking_severity(snap(L - 100.0, 1000.0), 1000.0, L), Severity::Nominal);
}

TEST(SeverityFilter, EscalatesImmediatelyAndClearsAfterFive) {
    SeverityFilter f(5);
    EXPECT_EQ(f.update(Severity::Critical), Severity::Critical);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(f.update(Severity::Nominal), Severity::Critical);
    EXPECT_EQ(f.update(Severity::Caution), Severity::Caution);
    EXPECT_EQ(f.update(Severity::Critical), Severity::Critical);
    // An interrupted streak starts over.
    for (int i = 0; i < 3; ++i) f.update(Severity::Nominal);
    EXPECT_EQ(f.update(Severity::Critical), Severity::Critical);
    for (int i = 0; i < 4; ++i) f.update(Severity::Nominal);
    EXPECT_EQ(f.update(Severity::Nominal), Severity::Nominal);
}
