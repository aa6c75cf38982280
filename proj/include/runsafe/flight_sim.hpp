// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "runsafe/frame.hpp"
#include "runsafe/net.hpp"
#include "runsafe/static_predictor.hpp"
#include "runsafe/telemetry.hpp"

namespace runsafe {

enum class ScenarioKind { NormalTakeoff, RtoAtSpeed, ThrustLossAt, Landing };

std::string_view to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(std::string_view name);

/// Per-channel Gaussian noise added to emitted frames (never to the physics).
struct NoiseStd {
    double ground_speed = 0.0;    // m/s
    double vertical_speed = 0.0;  // m/s
    double height_agl = 0.0;      // m
    double position = 0.0;        // m
    double acceleration = 0.0;    // m/s^2

    /// Documented default telemetry noise level.
    static NoiseStd defaults() { return {0.05, 0.05, 0.1, 0.1, 0.05}; }
};

struct LandingProfile {
    double start_height = 110.0;         // m AGL, above the 300 ft gate
    double flare_time_constant = 1.5;    // s, sink-rate decay
    double touchdown_sink_rate = 0.5;    // m/s
    double flare_decel = 1.0;            // m/s^2 airspeed bleed during the flare
    double free_roll_duration = 3.0;     // s
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::NormalTakeoff;
    TakeoffConfig takeoff;
    LandingConfig landing;
    LandingProfile landing_profile;
    double rto_speed = 0.0;              // RtoAtSpeed: indicated ground speed that triggers the rejection
    double thrust_loss_time = 0.0;       // ThrustLossAt: s after throttle-up
    double thrust_loss_fraction = 0.0;   // ThrustLossAt: fraction of thrust lost
    std::uint64_t noise_seed = 1;
    NoiseStd noise_std;
    double spoolup_duration = 4.0;       // s, brakes held
    double standby_duration = 2.0;       // s of idle frames before throttle-up
    double frame_rate = 20.0;            // Hz
    double substep = 0.005;              // s, physics step
    double max_time = 300.0;             // s
};

std::vector<FieldError> validate(const Scenario& scenario);

/// Measured from the simulated trajectory, independent of any predictor.
struct GroundTruth {
    // Takeoff
    double throttle_up_time = 0.0;
    double brake_release_time = 0.0;
    double brake_release_position = 0.0;
    std::optional<double> v1_time;
    std::optional<double> rto_time;
    std::optional<double> rto_speed;
    std::optional<double> rto_stop_position;
    std::optional<double> accelerate_stop_distance;  // stop position minus brake release position
    std::optional<double> liftoff_time;
    std::optional<double> liftoff_position;
    // Landing
    std::optional<double> threshold_time;            // 50 ft crossing
    std::optional<double> threshold_position;
    std::optional<double> touchdown_time;
    std::optional<double> touchdown_position;
    std::optional<double> touchdown_speed;
    std::optional<double> braking_time;
    std::optional<double> braking_position;
    std::optional<double> stop_time;
    std::optional<double> stop_position;
    std::optional<double> landing_distance;          // stop position minus 50 ft crossing position
};

struct ScenarioRun {
    std::vector<TelemetryFrame> frames;
    GroundTruth truth;
};

/// Internal state of the point-mass model.
struct SimState {
    double t = 0.0;
    double position = 0.0;
    double speed = 0.0;
    double height = 0.0;
    double vertical_speed = 0.0;
    double acceleration = 0.0;
    double throttle = 0.0;
    bool on_ground = true;
    bool braking = false;
};

/// One semi-implicit Euler ground-roll step at fixed throttle and brakes.
SimState step(SimState state, double dt, const GroundRoll& roll);

/// Deterministic for a given scenario and seed. Throws ScenarioInfeasible.
ScenarioRun run_scenario(const Scenario& scenario);

/// Records carrying the mapped channels of `frame`, one per distinct index,
/// unmapped slots filled with -999.
std::vector<DataRecord> records_from_frame(const TelemetryFrame& frame, const ChannelMapping& mapping);
/// "DATA" + 0x00 + little-endian records.
std::vector<std::uint8_t> encode_datagram(std::span<const DataRecord> records);

struct EmitStats {
    std::size_t sent = 0;
    std::size_t failures = 0;
    double wall_seconds = 0.0;
};

/// Sends one datagram per frame paced at `frame_rate * speedup`. Send
/// failures are counted, not fatal.
EmitStats emit_datagrams(std::span<const TelemetryFrame> frames, const ChannelMapping& mapping,
                         const net::Socket& socket, double frame_rate, double speedup = 1.0);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& scenario);

}  // namespace runsafe
