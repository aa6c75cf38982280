// SPDX-License-Identifier: Apache-2.0

#include "runsafe/static_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace runsafe {

namespace {

void append(std::vector<FieldError>& out, std::vector<FieldError> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

}  // namespace

std::vector<FieldError> validate(const IntegratorConfig& c) {
    std::vector<FieldError> out;
    if (!(c.dt > 0.0 && c.dt <= 0.5)) out.push_back({"integrator.dt", "must lie within (0, 0.5] s"});
    if (!(c.max_sim_time >= 60.0)) out.push_back({"integrator.max_sim_time", "must be >= 60 s"});
    if (!(c.reaction_time_at_v1 >= 0.0)) {
        out.push_back({"integrator.reaction_time_at_v1", "must be >= 0 s"});
    }
    return out;
}

std::vector<FieldError> validate(const TakeoffConfig& c) {
    std::vector<FieldError> out = validate(c.aircraft);
    append(out, validate(c.runway));
    append(out, validate(c.atmosphere));
    if (!(std::isfinite(c.v1) && c.v1 > 0.0)) out.push_back({"v1", "must be > 0"});
    if (!(std::isfinite(c.vr) && c.vr >= c.v1)) out.push_back({"vr", "must satisfy v1 <= vr"});
    if (!(std::isfinite(c.v2) && c.v2 >= c.vr)) out.push_back({"v2", "must satisfy vr <= v2"});
    return out;
}

std::vector<FieldError> validate(const LandingConfig& c) {
    std::vector<FieldError> out = validate(c.aircraft);
    append(out, validate(c.runway));
    append(out, validate(c.atmosphere));
    if (!(std::isfinite(c.vref) && c.vref > 0.0)) out.push_back({"vref", "must be > 0"});
    if (!(std::isfinite(c.vapp) && c.vapp > 0.0)) out.push_back({"vapp", "must be > 0"});
    if (!(c.glide_path > 0.02 && c.glide_path < 0.08)) {
        out.push_back({"glide_path", "must lie within (0.02, 0.08) rad"});
    }
    if (!(c.flare_duration >= 0.0)) out.push_back({"flare_duration", "must be >= 0 s"});
    if (!(c.free_roll_duration >= 0.0)) out.push_back({"free_roll_duration", "must be >= 0 s"});
    if (!(std::isfinite(c.autobrake_decel) && c.autobrake_decel > 0.0)) {
        out.push_back({"autobrake_decel", "must be > 0"});
    }
    return out;
}

void DistanceBreakdown::add(std::string label, double distance) {
    segments.push_back({std::move(label), distance});
    total += distance;
}

IntegrationResult integrate_to_speed(double start_speed, double target_speed, double throttle, bool braking,
                                     const GroundRoll& roll, const IntegratorConfig& integrator) {
    if (start_speed == target_speed) {
        return {};
    }
    const bool accelerating = target_speed > start_speed;
    const double dt = integrator.dt;

    double v = start_speed;
    double distance = 0.0;
    double t = 0.0;
    while (t < integrator.max_sim_time) {
        const double a = net_acceleration(v, throttle, braking, roll.aircraft, roll.runway, roll.atmosphere);
        const double v_next = v + a * dt;
        const bool crossed = accelerating ? v_next >= target_speed : v_next <= target_speed;
        if (crossed) {
            const double step = dt * (target_speed - v) / (v_next - v);
            distance += 0.5 * (v + target_speed) * step;
            return {distance, t + step};
        }
        distance += 0.5 * (v + v_next) * dt;
        v = v_next;
        t += dt;
    }
    throw Error(ErrorCode::NonConvergence,
                "target speed " + std::to_string(target_speed) + " m/s not reached within " +
                    std::to_string(integrator.max_sim_time) + " s (stalled at " + std::to_string(v) + " m/s)");
}

DistanceBreakdown compute_asdr(const TakeoffConfig& config, const IntegratorConfig& integrator) {
    const GroundRoll roll = config.ground_roll();
    DistanceBreakdown out;
    out.add("accelerate", integrate_to_speed(0.0, config.v1, 1.0, false, roll, integrator).distance);
    if (integrator.reaction_time_at_v1 > 0.0) {
        out.add("reaction", config.v1 * integrator.reaction_time_at_v1);
    }
    out.add("brake", integrate_to_speed(config.v1, 0.0, 0.0, true, roll, integrator).distance);
    out.runway_exceeded = out.total > config.runway.length;
    return out;
}

double compute_bdr(double current_speed, const TakeoffConfig& config, const IntegratorConfig& integrator) {
    if (current_speed <= 0.0) {
        return 0.0;
    }
    return integrate_to_speed(current_speed, 0.0, 0.0, true, config.ground_roll(), integrator).distance;
}

double approach_distance(double glide_path) {
    return (kApproachTopHeight - kFlareTopHeight) / std::tan(glide_path);
}

double flare_distance(double reference_speed, double flare_duration) {
    return kFlareSpeedFraction * reference_speed * flare_duration;
}

double free_roll_distance(double reference_speed, double free_roll_duration) {
    return kTouchdownSpeedFraction * reference_speed * free_roll_duration;
}

double braking_distance(double touchdown_speed, double decel) {
    return touchdown_speed * touchdown_speed / (2.0 * decel);
}

double effective_autobrake_decel(const LandingConfig& config) {
    return config.autobrake_decel + config.atmosphere.gravity * std::sin(config.runway.slope);
}

DistanceBreakdown compute_ldr(const LandingConfig& config) {
    DistanceBreakdown out;
    out.add("approach", approach_distance(config.glide_path));
    out.add("flare", flare_distance(config.vref, config.flare_duration));
    out.add("free_roll", free_roll_distance(config.vref, config.free_roll_duration));
    out.add("braking",
            braking_distance(kTouchdownSpeedFraction * config.vref, effective_autobrake_decel(config)));
    out.runway_exceeded = out.total > config.runway.length;
    return out;
}

BrakingDistanceTable::BrakingDistanceTable(const TakeoffConfig& config, const IntegratorConfig& integrator,
                                           double max_speed) {
    const GroundRoll roll = config.ground_roll();
    const double dt = integrator.dt;
    std::vector<double> travelled{0.0};
    speeds_.push_back(max_speed);
    double v = max_speed;
    double d = 0.0;
    double t = 0.0;
    while (v > 0.0) {
        if (t >= integrator.max_sim_time) {
            throw Error(ErrorCode::NonConvergence, "braking does not stop the aircraft");
        }
        const double a = net_acceleration(v, 0.0, true, roll.aircraft, roll.runway, roll.atmosphere);
        double v_next = v + a * dt;
        double step = dt;
        if (v_next <= 0.0) {
            step = dt * v / (v - v_next);
            v_next = 0.0;
        }
        d += 0.5 * (v + v_next) * step;
        v = v_next;
        t += step;
        speeds_.push_back(v);
        travelled.push_back(d);
    }
    remaining_.reserve(travelled.size());
    for (double x : travelled) {
        remaining_.push_back(d - x);
    }
}

double BrakingDistanceTable::operator()(double speed) const {
    if (speed <= 0.0) return 0.0;
    if (speed >= speeds_.front()) return remaining_.front();
    // speeds_ is strictly descending.
    const auto it = std::lower_bound(speeds_.begin(), speeds_.end(), speed, std::greater<>());
    const auto i = static_cast<std::size_t>(std::distance(speeds_.begin(), it));
    if (i == 0) return remaining_.front();
    const double v_hi = speeds_[i - 1];
    const double v_lo = speeds_[i];
    const double w = (speed - v_lo) / (v_hi - v_lo);
    return remaining_[i] + w * (remaining_[i - 1] - remaining_[i]);
}

}  // namespace runsafe
