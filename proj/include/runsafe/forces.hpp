// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

#include "runsafe/errors.hpp"

namespace runsafe {

inline constexpr double kStandardGravity = 9.80665;

enum class FlapDetent { F1, F5, F10, F15, F25, F30, F40 };

std::string_view to_string(FlapDetent detent);
FlapDetent flap_detent_from_string(std::string_view name);

/// Longitudinal performance parameters of the aircraft in its ground-roll
/// configuration. Aerodynamic coefficients belong to the selected flap detent.
struct AircraftParams {
    double mass = 70000.0;                  // kg
    double wing_area = 124.6;               // m^2
    double drag_coefficient_ground = 0.08;  // per flap setting
    double lift_coefficient_ground = 0.55;  // per flap setting
    double max_static_thrust = 240000.0;    // N, both engines
    double thrust_speed_slope = 400.0;      // N per m/s
    double idle_thrust = 8000.0;            // N
    double rolling_friction_mu = 0.02;
    double braking_friction_mu = 0.40;
    FlapDetent flap_setting = FlapDetent::F5;
};

/// Slope is positive uphill in the direction of motion; headwind is positive
/// against the direction of motion.
struct RunwayParams {
    double length = 3000.0;    // m
    double slope = 0.0;        // rad
    double elevation = 0.0;    // m
    double headwind = 0.0;     // m/s
};

struct AtmosphereParams {
    double air_density = 1.225;  // kg/m^3
    double temperature = 288.15; // K
    double gravity = kStandardGravity;
};

std::vector<FieldError> validate(const AircraftParams& aircraft, std::string_view prefix = "aircraft.");
std::vector<FieldError> validate(const RunwayParams& runway, std::string_view prefix = "runway.");
std::vector<FieldError> validate(const AtmosphereParams& atmosphere, std::string_view prefix = "atmosphere.");

/// Affine thrust lapse with speed, floored at half the static thrust, blended
/// with idle thrust by throttle fraction.
double thrust_force(double ground_speed, double throttle_fraction, const AircraftParams& aircraft);

/// 0.5 rho V^2 S Cd. Negative airspeed (tailwind faster than the aircraft) is
/// treated as zero.
double drag_force(double airspeed, const AtmosphereParams& atmosphere, const AircraftParams& aircraft);

double lift_force(double airspeed, const AtmosphereParams& atmosphere, const AircraftParams& aircraft);

/// Wheel friction on the lift-relieved normal force. Lift uses airspeed
/// (ground speed plus headwind).
double friction_force(double ground_speed, bool braking, const AtmosphereParams& atmosphere,
                      const AircraftParams& aircraft, const RunwayParams& runway);

/// Signed along-runway weight component; positive opposes motion (uphill).
double slope_gravity_force(const AircraftParams& aircraft, const RunwayParams& runway,
                           const AtmosphereParams& atmosphere = {});

double net_acceleration(double ground_speed, double throttle_fraction, bool braking,
                        const AircraftParams& aircraft, const RunwayParams& runway,
                        const AtmosphereParams& atmosphere);

}  // namespace runsafe
