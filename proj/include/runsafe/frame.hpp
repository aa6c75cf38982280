// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace runsafe {

/// One timestamped sample of aircraft state as delivered by telemetry.
struct TelemetryFrame {
    double timestamp = 0.0;              // s, strictly increasing within a session
    double ground_speed = 0.0;           // m/s
    double vertical_speed = 0.0;         // m/s, negative descending
    double height_agl = 0.0;             // m
    double distance_along_runway = 0.0;  // m from threshold
    double acceleration = 0.0;           // m/s^2, along track
    double throttle_fraction = 0.0;      // 0..1
    bool on_ground = true;
    bool brakes_applied = false;

    bool operator==(const TelemetryFrame&) const = default;
};

}  // namespace runsafe
