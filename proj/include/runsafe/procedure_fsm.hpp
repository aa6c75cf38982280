// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "runsafe/dynamic_predictor.hpp"

namespace runsafe {

enum class TakeoffState {
    Standby,
    Calculating,
    AsExpected,
    Warning,
    RejectTakeOff,
    RtoInitiated,
    RtoAsExpected,
    RtoBrakeMore,
    RtoMaxBrake,
    TakeOff,
};

enum class LandingState { SystemReady, WithinLimits, Warning, GoAround, TdWithinLimits, TdWarning, BrakeMore };

enum class StatusColor { Green, Amber, Red, Neutral };

enum class Severity { Nominal, Caution, Critical };

inline constexpr std::array kAllTakeoffStates{
    TakeoffState::Standby,       TakeoffState::Calculating,  TakeoffState::AsExpected,
    TakeoffState::Warning,       TakeoffState::RejectTakeOff, TakeoffState::RtoInitiated,
    TakeoffState::RtoAsExpected, TakeoffState::RtoBrakeMore, TakeoffState::RtoMaxBrake,
    TakeoffState::TakeOff,
};

inline constexpr std::array kAllLandingStates{
    LandingState::SystemReady,    LandingState::WithinLimits, LandingState::Warning, LandingState::GoAround,
    LandingState::TdWithinLimits, LandingState::TdWarning,    LandingState::BrakeMore,
};

inline constexpr std::array kAllSeverities{Severity::Nominal, Severity::Caution, Severity::Critical};

std::string_view to_string(TakeoffState state);
std::string_view to_string(LandingState state);
std::string_view to_string(StatusColor color);
std::string_view to_string(Severity severity);

struct TakeoffEvent {
    enum class Kind { ThrottleUp, SeedComplete, Severity, RtoDetected, V1Reached, Stopped };
    Kind kind;
    Severity severity = Severity::Nominal;  // read for SeedComplete and Severity
};

struct LandingEvent {
    enum class Kind { Below300ft, Severity, Touchdown, BrakingStarted, Stopped };
    Kind kind;
    Severity severity = Severity::Nominal;  // read for Below300ft, Severity and Touchdown
};

inline constexpr std::array kAllTakeoffEventKinds{
    TakeoffEvent::Kind::ThrottleUp,  TakeoffEvent::Kind::SeedComplete, TakeoffEvent::Kind::Severity,
    TakeoffEvent::Kind::RtoDetected, TakeoffEvent::Kind::V1Reached,    TakeoffEvent::Kind::Stopped,
};

inline constexpr std::array kAllLandingEventKinds{
    LandingEvent::Kind::Below300ft, LandingEvent::Kind::Severity, LandingEvent::Kind::Touchdown,
    LandingEvent::Kind::BrakingStarted, LandingEvent::Kind::Stopped,
};

std::string_view to_string(TakeoffEvent::Kind kind);
std::string_view to_string(LandingEvent::Kind kind);

inline constexpr double kWarningDeviation = 0.02;
inline constexpr double kMaxBrakeOverrunFraction = 0.10;

/// Nominal below 2% deviation from the static reference, Caution at or above
/// it, Critical whenever the predicted stop lies at or beyond the runway end
/// (or the target speed is unreachable under the current fit).
Severity classify(const PredictionSnapshot& snapshot, double static_total, double runway_length);

/// Braking variant: a projected overrun of at most 10% of the runway is
/// reported as Caution (brake more), beyond that as Critical (max brake).
Severity braking_severity(const PredictionSnapshot& snapshot, double static_total, double runway_length);

/// Throws IllegalTransition for pairs outside the documented graph.
TakeoffState takeoff_transition(TakeoffState state, TakeoffEvent event);
LandingState landing_transition(LandingState state, LandingEvent event);

StatusColor color_of(TakeoffState state);
StatusColor color_of(LandingState state);

/// Severity hysteresis. Escalations pass through immediately; a downgrade
/// takes effect only after `clear_frames` consecutive lower readings.
class SeverityFilter {
public:
    explicit SeverityFilter(std::size_t clear_frames = 5) : clear_frames_(clear_frames) {}

    Severity update(Severity raw);
    Severity current() const { return current_; }
    void reset(Severity to = Severity::Nominal);

private:
    std::size_t clear_frames_;
    Severity current_ = Severity::Nominal;
    Severity pending_max_ = Severity::Nominal;
    std::size_t lower_count_ = 0;
};

}  // namespace runsafe
