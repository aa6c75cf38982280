// SPDX-License-Identifier: Apache-2.0

#include "runsafe/procedure_fsm.hpp"

#include <algorithm>
#include <string>

#include "runsafe/errors.hpp"

namespace runsafe {

std::string_view to_string(TakeoffState s) {
    switch (s) {
        case TakeoffState::Standby: return "Standby";
        case TakeoffState::Calculating: return "Calculating";
        case TakeoffState::AsExpected: return "AsExpected";
        case TakeoffState::Warning: return "Warning";
        case TakeoffState::RejectTakeOff: return "RejectTakeOff";
        case TakeoffState::RtoInitiated: return "RtoInitiated";
        case TakeoffState::RtoAsExpected: return "RtoAsExpected";
        case TakeoffState::RtoBrakeMore: return "RtoBrakeMore";
        case TakeoffState::RtoMaxBrake: return "RtoMaxBrake";
        case TakeoffState::TakeOff: return "TakeOff";
    }
    return "?";
}

std::string_view to_string(LandingState s) {
    switch (s) {
        case LandingState::SystemReady: return "SystemReady";
        case LandingState::WithinLimits: return "WithinLimits";
        case LandingState::Warning: return "Warning";
        case LandingState::GoAround: return "GoAround";
        case LandingState::TdWithinLimits: return "TdWithinLimits";
        case LandingState::TdWarning: return "TdWarning";
        case LandingState::BrakeMore: return "BrakeMore";
    }
    return "?";
}

std::string_view to_string(StatusColor c) {
    switch (c) {
        case StatusColor::Green: return "Green";
        case StatusColor::Amber: return "Amber";
        case StatusColor::Red: return "Red";
        case StatusColor::Neutral: return "Neutral";
    }
    return "?";
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Nominal: return "Nominal";
        case Severity::Caution: return "Caution";
        case Severity::Critical: return "Critical";
    }
    return "?";
}

std::string_view to_string(TakeoffEvent::Kind k) {
    using K = TakeoffEvent::Kind;
    switch (k) {
        case K::ThrottleUp: return "ThrottleUp";
        case K::SeedComplete: return "SeedComplete";
        case K::Severity: return "Severity";
        case K::RtoDetected: return "RtoDetected";
        case K::V1Reached: return "V1Reached";
        case K::Stopped: return "Stopped";
    }
    return "?";
}

std::string_view to_string(LandingEvent::Kind k) {
    using K = LandingEvent::Kind;
    switch (k) {
        case K::Below300ft: return "Below300ft";
        case K::Severity: return "Severity";
        case K::Touchdown: return "Touchdown";
        case K::BrakingStarted: return "BrakingStarted";
        case K::Stopped: return "Stopped";
    }
    return "?";
}

Severity classify(const PredictionSnapshot& snapshot, double static_total, double runway_length) {
    const double margin = runway_length - snapshot.stop_position;
    if (snapshot.target_unreachable || margin <= 0.0) {
        return Severity::Critical;
    }
    const double delta = (snapshot.dynamic_required_distance - static_total) / static_total;
    return std::abs(delta) < kWarningDeviation ? Severity::Nominal : Severity::Caution;
}

Severity braking_severity(const PredictionSnapshot& snapshot, double static_total, double runway_length) {
    const Severity s = classify(snapshot, static_total, runway_length);
    if (s == Severity::Critical && !snapshot.target_unreachable) {
        const double overrun = snapshot.stop_position - runway_length;
        if (overrun <= kMaxBrakeOverrunFraction * runway_length) {
            return Severity::Caution;
        }
    }
    return s;
}

namespace {

[[noreturn]] void illegal(std::string_view state, std::string_view event) {
    throw Error(ErrorCode::IllegalTransition,
                "event " + std::string(event) + " is not accepted in state " + std::string(state));
}

TakeoffState rolling_state(Severity s) {
    switch (s) {
        case Severity::Nominal: return TakeoffState::AsExpected;
        case Severity::Caution: return TakeoffState::Warning;
        case Severity::Critical: return TakeoffState::RejectTakeOff;
    }
    return TakeoffState::AsExpected;
}

TakeoffState rto_state(Severity s) {
    switch (s) {
        case Severity::Nominal: return TakeoffState::RtoAsExpected;
        case Severity::Caution: return TakeoffState::RtoBrakeMore;
        case Severity::Critical: return TakeoffState::RtoMaxBrake;
    }
    return TakeoffState::RtoAsExpected;
}

LandingState airborne_state(Severity s) {
    switch (s) {
        case Severity::Nominal: return LandingState::WithinLimits;
        case Severity::Caution: return LandingState::Warning;
        case Severity::Critical: return LandingState::GoAround;
    }
    return LandingState::WithinLimits;
}

LandingState touchdown_state(Severity s) {
    switch (s) {
        case Severity::Nominal: return LandingState::TdWithinLimits;
        case Severity::Caution: return LandingState::TdWarning;
        case Severity::Critical: return LandingState::BrakeMore;
    }
    return LandingState::TdWithinLimits;
}

}  // namespace

TakeoffState takeoff_transition(TakeoffState state, TakeoffEvent event) {
    using S = TakeoffState;
    using K = TakeoffEvent::Kind;
    switch (state) {
        case S::Standby:
            if (event.kind == K::ThrottleUp) return S::Calculating;
            break;
        case S::Calculating:
            if (event.kind == K::SeedComplete) return rolling_state(event.severity);
            if (event.kind == K::RtoDetected) return S::RtoInitiated;
            if (event.kind == K::V1Reached) return S::TakeOff;
            break;
        case S::AsExpected:
        case S::Warning:
        case S::RejectTakeOff:
            if (event.kind == K::Severity) return rolling_state(event.severity);
            if (event.kind == K::RtoDetected) return S::RtoInitiated;
            if (event.kind == K::V1Reached) return S::TakeOff;
            break;
        case S::TakeOff:
            if (event.kind == K::RtoDetected) return S::RtoInitiated;
            break;
        case S::RtoInitiated:
        case S::RtoAsExpected:
        case S::RtoBrakeMore:
        case S::RtoMaxBrake:
            if (event.kind == K::Severity) return rto_state(event.severity);
            if (event.kind == K::Stopped) return state;
            break;
    }
    illegal(to_string(state), to_string(event.kind));
}

LandingState landing_transition(LandingState state, LandingEvent event) {
    using S = LandingState;
    using K = LandingEvent::Kind;
    switch (state) {
        case S::SystemReady:
            if (event.kind == K::Below300ft) return airborne_state(event.severity);
            break;
        case S::WithinLimits:
        case S::Warning:
        case S::GoAround:
            if (event.kind == K::Severity) return airborne_state(event.severity);
            if (event.kind == K::Touchdown) return touchdown_state(event.severity);
            break;
        case S::TdWithinLimits:
        case S::TdWarning:
        case S::BrakeMore:
            if (event.kind == K::Severity) return touchdown_state(event.severity);
            if (event.kind == K::BrakingStarted || event.kind == K::Stopped) return state;
            break;
    }
    illegal(to_string(state), to_string(event.kind));
}

StatusColor color_of(TakeoffState state) {
    using S = TakeoffState;
    switch (state) {
        case S::Standby:
        case S::Calculating: return StatusColor::Neutral;
        case S::AsExpected:
        case S::RtoAsExpected:
        case S::TakeOff: return StatusColor::Green;
        case S::Warning:
        case S::RtoInitiated:
        case S::RtoBrakeMore: return StatusColor::Amber;
        case S::RejectTakeOff:
        case S::RtoMaxBrake: return StatusColor::Red;
    }
    return StatusColor::Neutral;
}

StatusColor color_of(LandingState state) {
    using S = LandingState;
    switch (state) {
        case S::SystemReady: return StatusColor::Neutral;
        case S::WithinLimits:
        case S::TdWithinLimits: return StatusColor::Green;
        case S::Warning:
        case S::TdWarning:
        case S::BrakeMore: return StatusColor::Amber;
        case S::GoAround: return StatusColor::Red;
    }
    return StatusColor::Neutral;
}

Severity SeverityFilter::update(Severity raw) {
    if (raw >= current_) {
        current_ = raw;
        lower_count_ = 0;
        pending_max_ = Severity::Nominal;
        return current_;
    }
    pending_max_ = lower_count_ == 0 ? raw : std::max(pending_max_, raw);
    if (++lower_count_ >= clear_frames_) {
        current_ = pending_max_;
        lower_count_ = 0;
        pending_max_ = Severity::Nominal;
    }
    return current_;
}

void SeverityFilter::reset(Severity to) {
    current_ = to;
    lower_count_ = 0;
    pending_max_ = Severity::Nominal;
}

}  // namespace runsafe
