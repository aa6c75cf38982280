// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "runsafe/forces.hpp"

namespace runsafe {

inline constexpr double kFeetToMeters = 0.3048;

struct IntegratorConfig {
    double dt = 0.05;                  // s
    double max_sim_time = 300.0;       // s
    double reaction_time_at_v1 = 2.0;  // s, 0 disables the reaction segment
};

std::vector<FieldError> validate(const IntegratorConfig& integrator);

/// Shared physical context of a ground roll.
struct GroundRoll {
    AircraftParams aircraft;
    RunwayParams runway;
    AtmosphereParams atmosphere;
};

/// All speeds are ground speeds.
struct TakeoffConfig {
    AircraftParams aircraft;
    RunwayParams runway;
    AtmosphereParams atmosphere;
    double v1 = 70.0;
    double vr = 73.0;
    double v2 = 78.0;

    GroundRoll ground_roll() const { return {aircraft, runway, atmosphere}; }
};

struct LandingConfig {
    AircraftParams aircraft;
    RunwayParams runway;
    AtmosphereParams atmosphere;
    double vref = 68.0;
    double vapp = 70.0;
    double glide_path = 0.05236;       // rad
    double flare_duration = 5.0;       // s
    double free_roll_duration = 3.5;   // s
    double autobrake_decel = 2.2;      // m/s^2
};

/// Field-level checks of the type invariants. Achievability of V1 is not
/// checked here; the integrator reports it as NonConvergence.
std::vector<FieldError> validate(const TakeoffConfig& config);
std::vector<FieldError> validate(const LandingConfig& config);

struct Segment {
    std::string label;
    double distance = 0.0;  // m
};

struct DistanceBreakdown {
    std::vector<Segment> segments;
    double total = 0.0;
    bool runway_exceeded = false;

    void add(std::string label, double distance);
};

struct IntegrationResult {
    double distance = 0.0;  // m
    double elapsed = 0.0;   // s
};

/// Time-stepped ground roll from `start_speed` to `target_speed`. Acceleration
/// is sampled at the start of each step; distance accumulates the mean of the
/// step's endpoint speeds, and the step that crosses the target is cut at the
/// linearly interpolated crossing. Throws NonConvergence when the target is
/// not crossed within `max_sim_time`.
IntegrationResult integrate_to_speed(double start_speed, double target_speed, double throttle, bool braking,
                                     const GroundRoll& roll, const IntegratorConfig& integrator);

/// Accelerate 0 -> V1 at full throttle, optional reaction roll at V1, brake to
/// a stop at idle thrust with braking friction.
DistanceBreakdown compute_asdr(const TakeoffConfig& config, const IntegratorConfig& integrator);

/// Stopping distance from `current_speed` under maximum braking at idle.
double compute_bdr(double current_speed, const TakeoffConfig& config, const IntegratorConfig& integrator);

// Per-phase landing models. `reference_speed` plays the role of Vref.
double approach_distance(double glide_path);
double flare_distance(double reference_speed, double flare_duration);
double free_roll_distance(double reference_speed, double free_roll_duration);
double braking_distance(double touchdown_speed, double decel);
double effective_autobrake_decel(const LandingConfig& config);

inline constexpr double kFlareSpeedFraction = 0.98;
inline constexpr double kTouchdownSpeedFraction = 0.925;
inline constexpr double kApproachTopHeight = 50.0 * kFeetToMeters;
inline constexpr double kFlareTopHeight = 20.0 * kFeetToMeters;
inline constexpr double kPreApproachTopHeight = 300.0 * kFeetToMeters;

DistanceBreakdown compute_ldr(const LandingConfig& config);

/// BDR lookup built from a single braking integration out of `max_speed`.
/// Braking deceleration depends only on speed, so the stopping distance from
/// any lower speed is the tail of that one trajectory.
class BrakingDistanceTable {
public:
    BrakingDistanceTable(const TakeoffConfig& config, const IntegratorConfig& integrator, double max_speed);

    double operator()(double speed) const;
    double max_speed() const { return speeds_.front(); }

private:
    // Descending speeds with remaining distance to stop at each.
    std::vector<double> speeds_;
    std::vector<double> remaining_;
};

}  // namespace runsafe
