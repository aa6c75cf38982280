// SPDX-License-Identifier: Apache-2.0

#include "runsafe/flight_sim.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "runsafe/procedure_config.hpp"

namespace runsafe {

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::NormalTakeoff: return "NormalTakeoff";
        case ScenarioKind::RtoAtSpeed: return "RtoAtSpeed";
        case ScenarioKind::ThrustLossAt: return "ThrustLossAt";
        case ScenarioKind::Landing: return "Landing";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
    for (auto k : {ScenarioKind::NormalTakeoff, ScenarioKind::RtoAtSpeed, ScenarioKind::ThrustLossAt,
                   ScenarioKind::Landing}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("kind", "unknown scenario kind '" + std::string(name) + "'");
}

std::vector<FieldError> validate(const Scenario& s) {
    std::vector<FieldError> out =
        s.kind == ScenarioKind::Landing ? validate(s.landing) : validate(s.takeoff);
    if (!(s.frame_rate >= 5.0 && s.frame_rate <= 100.0)) {
        out.push_back({"frame_rate", "must lie within [5, 100] Hz"});
    }
    if (!(s.substep > 0.0 && s.substep <= 1.0 / s.frame_rate)) {
        out.push_back({"substep", "must lie within (0, 1/frame_rate]"});
    }
    if (!(s.spoolup_duration >= 0.0)) out.push_back({"spoolup_duration", "must be >= 0"});
    if (!(s.standby_duration >= 0.0)) out.push_back({"standby_duration", "must be >= 0"});
    if (s.kind == ScenarioKind::RtoAtSpeed && !(s.rto_speed > 0.0)) {
        out.push_back({"rto_speed", "must be > 0"});
    }
    if (s.kind == ScenarioKind::ThrustLossAt && !(s.thrust_loss_fraction >= 0.0 && s.thrust_loss_fraction <= 1.0)) {
        out.push_back({"thrust_loss_fraction", "must lie within [0, 1]"});
    }
    const auto& n = s.noise_std;
    for (double sd : {n.ground_speed, n.vertical_speed, n.height_agl, n.position, n.acceleration}) {
        if (!(sd >= 0.0)) {
            out.push_back({"noise_std", "standard deviations must be >= 0"});
            break;
        }
    }
    return out;
}

SimState step(SimState s, double dt, const GroundRoll& roll) {
    const double a =
        net_acceleration(s.speed, s.throttle, s.braking, roll.aircraft, roll.runway, roll.atmosphere);
    s.acceleration = a;
    const double v_next = s.speed + a * dt;
    if (v_next < 0.0) {
        // Wheels do not roll backwards; a braking stop is cut at the crossing.
        if (s.speed > 0.0) s.position += 0.5 * s.speed * (s.speed / -a);
        s.speed = 0.0;
        s.acceleration = 0.0;
    } else {
        s.speed = v_next;
        s.position += v_next * dt;
    }
    s.t += dt;
    return s;
}

namespace {

class FrameRecorder {
public:
    FrameRecorder(const Scenario& s) : noise_(s.noise_std), rng_(s.noise_seed) {}

    void record(const SimState& st) {
        speed_noise_ = draw(noise_.ground_speed);
        TelemetryFrame f;
        f.timestamp = st.t;
        f.ground_speed = std::max(st.speed + speed_noise_, 0.0);
        f.vertical_speed = st.vertical_speed + draw(noise_.vertical_speed);
        f.height_agl = st.on_ground ? 0.0 : std::max(st.height + draw(noise_.height_agl), 0.0);
        f.distance_along_runway = st.position + draw(noise_.position);
        f.acceleration = st.acceleration + draw(noise_.acceleration);
        f.throttle_fraction = st.throttle;
        f.on_ground = st.on_ground;
        f.brakes_applied = st.braking;
        frames.push_back(f);
    }

    /// Speed error of the most recent frame, what the crew reads.
    double indicated_offset() const { return speed_noise_; }

    std::vector<TelemetryFrame> frames;

private:
    double draw(double sd) { return sd > 0.0 ? sd * normal_(rng_) : 0.0; }

    NoiseStd noise_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double speed_noise_ = 0.0;
};

[[noreturn]] void infeasible(const std::string& why) { throw Error(ErrorCode::ScenarioInfeasible, why); }

ScenarioRun run_takeoff(const Scenario& s) {
    enum class Phase { Standby, Spoolup, Roll, Airborne, Rto, Stopped };
    const TakeoffConfig& c = s.takeoff;
    const GroundRoll roll = c.ground_roll();
    const double frame_dt = 1.0 / s.frame_rate;
    const int substeps = std::max(1, static_cast<int>(std::lround(frame_dt / s.substep)));
    const double h = frame_dt / substeps;
    const double liftoff_speed = 0.5 * (c.vr + c.v2);
    constexpr double kClimbRate = 3.0;
    constexpr double kAirborneTail = 5.0;
    constexpr double kStoppedTail = 1.0;

    ScenarioRun run;
    FrameRecorder rec(s);
    GroundTruth& truth = run.truth;
    truth.throttle_up_time = s.standby_duration;
    truth.brake_release_time = s.standby_duration + s.spoolup_duration;

    SimState st;
    st.braking = true;
    Phase phase = Phase::Standby;
    double phase_since = 0.0;
    long long n = 0;

    rec.record(st);
    while (true) {
        for (int k = 0; k < substeps; ++k) {
            const double t = static_cast<double>(n) * h;
            switch (phase) {
                case Phase::Standby:
                    if (t >= truth.throttle_up_time) phase = Phase::Spoolup;
                    break;
                case Phase::Spoolup:
                    if (t >= truth.brake_release_time) {
                        phase = Phase::Roll;
                        st.braking = false;
                        truth.brake_release_position = st.position;
                    }
                    break;
                default: break;
            }
            switch (phase) {
                case Phase::Standby:
                    st.throttle = 0.0;
                    st.t = t + h;
                    break;
                case Phase::Spoolup:
                    st.throttle = s.spoolup_duration > 0.0
                                      ? std::min((t - truth.throttle_up_time) / s.spoolup_duration, 1.0)
                                      : 1.0;
                    st.t = t + h;
                    break;
                case Phase::Roll: {
                    const bool lost = s.kind == ScenarioKind::ThrustLossAt &&
                                      t - truth.throttle_up_time >= s.thrust_loss_time;
                    st.throttle = lost ? 1.0 - s.thrust_loss_fraction : 1.0;
                    st = step(st, h, roll);
                    if (!truth.v1_time && st.speed >= c.v1) truth.v1_time = st.t;
                    if (s.kind == ScenarioKind::RtoAtSpeed && st.speed + rec.indicated_offset() >= s.rto_speed) {
                        phase = Phase::Rto;
                        truth.rto_time = st.t;
                        truth.rto_speed = st.speed;
                        st.throttle = 0.0;
                        st.braking = true;
                    } else if (s.kind != ScenarioKind::RtoAtSpeed && st.speed >= liftoff_speed) {
                        phase = Phase::Airborne;
                        phase_since = st.t;
                        st.on_ground = false;
                        truth.liftoff_time = st.t;
                        truth.liftoff_position = st.position;
                    }
                    break;
                }
                case Phase::Airborne:
                    st = step(st, h, roll);
                    st.vertical_speed = kClimbRate;
                    st.height += kClimbRate * h;
                    break;
                case Phase::Rto:
                    st = step(st, h, roll);
                    if (st.speed <= 0.0) {
                        phase = Phase::Stopped;
                        phase_since = st.t;
                        truth.rto_stop_position = st.position;
                        truth.accelerate_stop_distance = st.position - truth.brake_release_position;
                    }
                    break;
                case Phase::Stopped:
                    st.acceleration = 0.0;
                    st.t = t + h;
                    break;
            }
            ++n;
        }
        st.t = static_cast<double>(n) * h;
        rec.record(st);
        if ((phase == Phase::Airborne && st.t - phase_since >= kAirborneTail) ||
            (phase == Phase::Stopped && st.t - phase_since >= kStoppedTail)) {
            break;
        }
        if (st.t > s.max_time) {
            infeasible("aircraft did not complete the " + std::string(to_string(s.kind)) + " within " +
                       std::to_string(s.max_time) + " s");
        }
    }
    run.frames = std::move(rec.frames);
    return run;
}

ScenarioRun run_landing(const Scenario& s) {
    enum class Phase { Approach, Flare, FreeRoll, Braking, Stopped };
    const LandingConfig& c = s.landing;
    const LandingProfile& p = s.landing_profile;
    const GroundRoll roll{c.aircraft, c.runway, c.atmosphere};
    const double frame_dt = 1.0 / s.frame_rate;
    const int substeps = std::max(1, static_cast<int>(std::lround(frame_dt / s.substep)));
    const double h = frame_dt / substeps;
    const double tan_glide = std::tan(c.glide_path);
    const double headwind = c.runway.headwind;
    const double braking_decel = effective_autobrake_decel(c);
    constexpr double kStoppedTail = 1.0;

    ScenarioRun run;
    FrameRecorder rec(s);
    GroundTruth& truth = run.truth;

    double airspeed = c.vref;
    SimState st;
    st.on_ground = false;
    st.speed = airspeed - headwind;
    if (!(st.speed > 0.0)) infeasible("headwind exceeds approach speed");
    st.height = p.start_height;
    st.vertical_speed = -st.speed * tan_glide;
    st.position = -(p.start_height - kApproachTopHeight) / tan_glide;
    st.throttle = 0.0;

    Phase phase = Phase::Approach;
    double phase_since = 0.0;
    double flare_sink0 = 0.0;
    long long n = 0;

    rec.record(st);
    while (true) {
        for (int k = 0; k < substeps; ++k) {
            const double t = static_cast<double>(n) * h;
            switch (phase) {
                case Phase::Approach: {
                    const double h_prev = st.height;
                    const double x_prev = st.position;
                    st.vertical_speed = -st.speed * tan_glide;
                    st.height += st.vertical_speed * h;
                    st.position += st.speed * h;
                    st.acceleration = 0.0;
                    if (!truth.threshold_time && h_prev > kApproachTopHeight && st.height <= kApproachTopHeight) {
                        const double w = (h_prev - kApproachTopHeight) / (h_prev - st.height);
                        truth.threshold_time = t + w * h;
                        truth.threshold_position = x_prev + w * (st.position - x_prev);
                    }
                    if (st.height <= kFlareTopHeight) {
                        phase = Phase::Flare;
                        phase_since = t + h;
                        flare_sink0 = -st.vertical_speed;
                    }
                    break;
                }
                case Phase::Flare: {
                    const double in_flare = t - phase_since;
                    const double sink = p.touchdown_sink_rate +
                                        (flare_sink0 - p.touchdown_sink_rate) * std::exp(-in_flare / p.flare_time_constant);
                    airspeed -= p.flare_decel * h;
                    st.speed = std::max(airspeed - headwind, 0.0);
                    st.acceleration = -p.flare_decel;
                    st.vertical_speed = -sink;
                    st.height -= sink * h;
                    st.position += st.speed * h;
                    if (st.height <= 0.0) {
                        st.height = 0.0;
                        st.vertical_speed = 0.0;
                        st.on_ground = true;
                        phase = Phase::FreeRoll;
                        phase_since = t + h;
                        truth.touchdown_time = t + h;
                        truth.touchdown_position = st.position;
                        truth.touchdown_speed = st.speed;
                    }
                    break;
                }
                case Phase::FreeRoll: {
                    const double keep_t = t + h;
                    st = step(st, h, roll);
                    st.t = keep_t;
                    if (keep_t - phase_since >= p.free_roll_duration - 1e-9) {
                        phase = Phase::Braking;
                        st.braking = true;
                        truth.braking_time = keep_t;
                        truth.braking_position = st.position;
                    }
                    break;
                }
                case Phase::Braking: {
                    const double v_next = st.speed - braking_decel * h;
                    st.acceleration = -braking_decel;
                    if (v_next <= 0.0) {
                        st.position += 0.5 * st.speed * (st.speed / braking_decel);
                        st.speed = 0.0;
                        st.acceleration = 0.0;
                        phase = Phase::Stopped;
                        phase_since = t + h;
                        truth.stop_time = t + h;
                        truth.stop_position = st.position;
                        if (truth.threshold_position) {
                            truth.landing_distance = st.position - *truth.threshold_position;
                        }
                    } else {
                        st.speed = v_next;
                        st.position += v_next * h;
                    }
                    break;
                }
                case Phase::Stopped:
                    st.acceleration = 0.0;
                    break;
            }
            ++n;
        }
        st.t = static_cast<double>(n) * h;
        rec.record(st);
        if (phase == Phase::Stopped && st.t - phase_since >= kStoppedTail) break;
        if (st.t > s.max_time) infeasible("landing did not come to a stop within " + std::to_string(s.max_time) + " s");
    }
    run.frames = std::move(rec.frames);
    return run;
}

}  // namespace

ScenarioRun run_scenario(const Scenario& scenario) {
    if (auto errors = validate(scenario); !errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return scenario.kind == ScenarioKind::Landing ? run_landing(scenario) : run_takeoff(scenario);
}

std::vector<DataRecord> records_from_frame(const TelemetryFrame& frame, const ChannelMapping& mapping) {
    std::map<std::int32_t, DataRecord> by_index;
    auto put = [&](const ChannelSlot& slot, double si_value) {
        auto [it, inserted] = by_index.try_emplace(slot.index);
        if (inserted) {
            it->second.index = slot.index;
            it->second.values.fill(-999.0f);
        }
        it->second.values[static_cast<std::size_t>(slot.slot)] =
            static_cast<float>((si_value - slot.offset) / slot.scale);
    };
    if (mapping.time) put(*mapping.time, frame.timestamp);
    put(mapping.ground_speed, frame.ground_speed);
    put(mapping.vertical_speed, frame.vertical_speed);
    put(mapping.height_agl, frame.height_agl);
    put(mapping.distance_along_runway, frame.distance_along_runway);
    put(mapping.acceleration, frame.acceleration);
    put(mapping.throttle, frame.throttle_fraction);
    put(mapping.on_ground, frame.on_ground ? 1.0 : 0.0);
    put(mapping.brakes, frame.brakes_applied ? 1.0 : 0.0);

    std::vector<DataRecord> out;
    out.reserve(by_index.size());
    for (auto& [index, record] : by_index) out.push_back(record);
    return out;
}

std::vector<std::uint8_t> encode_datagram(std::span<const DataRecord> records) {
    std::vector<std::uint8_t> out;
    out.reserve(kPrologueSize + records.size() * kRecordSize);
    for (std::uint8_t b : kDataMagic) out.push_back(b);
    out.push_back(0x00);
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    for (const auto& r : records) {
        put32(static_cast<std::uint32_t>(r.index));
        for (float v : r.values) put32(std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

EmitStats emit_datagrams(std::span<const TelemetryFrame> frames, const ChannelMapping& mapping,
                         const net::Socket& socket, double frame_rate, double speedup) {
    using clock = std::chrono::steady_clock;
    EmitStats stats;
    const auto period = std::chrono::duration<double>(1.0 / (frame_rate * speedup));
    const auto start = clock::now();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(period * static_cast<double>(i)));
        const auto records = records_from_frame(frames[i], mapping);
        if (net::send_datagram(socket, encode_datagram(records))) {
            ++stats.sent;
        } else {
            ++stats.failures;
        }
    }
    stats.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return stats;
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.kind = scenario_kind_from_string(j.at("kind").get<std::string>());
    if (s.kind == ScenarioKind::Landing) {
        s.landing = parse_landing(j.at("landing"));
        if (j.contains("landing_profile")) {
            const auto& p = j.at("landing_profile");
            s.landing_profile.start_height = p.value("start_height", s.landing_profile.start_height);
            s.landing_profile.flare_time_constant = p.value("flare_time_constant", s.landing_profile.flare_time_constant);
            s.landing_profile.touchdown_sink_rate = p.value("touchdown_sink_rate", s.landing_profile.touchdown_sink_rate);
            s.landing_profile.flare_decel = p.value("flare_decel", s.landing_profile.flare_decel);
            s.landing_profile.free_roll_duration = p.value("free_roll_duration", s.landing_profile.free_roll_duration);
        }
    } else {
        s.takeoff = parse_takeoff(j.at("takeoff")).config;
    }
    s.rto_speed = j.value("rto_speed", s.kind == ScenarioKind::RtoAtSpeed ? s.takeoff.v1 : 0.0);
    s.thrust_loss_time = j.value("thrust_loss_time", s.thrust_loss_time);
    s.thrust_loss_fraction = j.value("thrust_loss_fraction", s.thrust_loss_fraction);
    s.noise_seed = j.value("noise_seed", s.noise_seed);
    if (j.contains("noise_std")) {
        const auto& n = j.at("noise_std");
        if (n.is_string() && n.get<std::string>() == "default") {
            s.noise_std = NoiseStd::defaults();
        } else {
            s.noise_std.ground_speed = n.value("ground_speed", 0.0);
            s.noise_std.vertical_speed = n.value("vertical_speed", 0.0);
            s.noise_std.height_agl = n.value("height_agl", 0.0);
            s.noise_std.position = n.value("position", 0.0);
            s.noise_std.acceleration = n.value("acceleration", 0.0);
        }
    }
    s.spoolup_duration = j.value("spoolup_duration", s.spoolup_duration);
    s.standby_duration = j.value("standby_duration", s.standby_duration);
    s.frame_rate = j.value("frame_rate", s.frame_rate);
    s.substep = j.value("substep", s.substep);
    s.max_time = j.value("max_time", s.max_time);
    return s;
}

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json j = {
        {"kind", std::string(to_string(s.kind))},
        {"noise_seed", s.noise_seed},
        {"noise_std",
         {{"ground_speed", s.noise_std.ground_speed},
          {"vertical_speed", s.noise_std.vertical_speed},
          {"height_agl", s.noise_std.height_agl},
          {"position", s.noise_std.position},
          {"acceleration", s.noise_std.acceleration}}},
        {"spoolup_duration", s.spoolup_duration},
        {"standby_duration", s.standby_duration},
        {"frame_rate", s.frame_rate},
        {"substep", s.substep},
        {"max_time", s.max_time},
    };
    if (s.kind == ScenarioKind::Landing) {
        j["landing"] = to_json(s.landing);
        j["landing_profile"] = {{"start_height", s.landing_profile.start_height},
                                {"flare_time_constant", s.landing_profile.flare_time_constant},
                                {"touchdown_sink_rate", s.landing_profile.touchdown_sink_rate},
                                {"flare_decel", s.landing_profile.flare_decel},
                                {"free_roll_duration", s.landing_profile.free_roll_duration}};
    } else {
        j["takeoff"] = to_json(TakeoffRequest{s.takeoff, {}});
        j["rto_speed"] = s.rto_speed;
        j["thrust_loss_time"] = s.thrust_loss_time;
        j["thrust_loss_fraction"] = s.thrust_loss_fraction;
    }
    return j;
}

}  // namespace runsafe
