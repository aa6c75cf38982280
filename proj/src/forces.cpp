// SPDX-License-Identifier: Apache-2.0

#include "runsafe/forces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace runsafe {

namespace {

constexpr std::array<std::pair<FlapDetent, std::string_view>, 7> kFlapNames{{
    {FlapDetent::F1, "1"},
    {FlapDetent::F5, "5"},
    {FlapDetent::F10, "10"},
    {FlapDetent::F15, "15"},
    {FlapDetent::F25, "25"},
    {FlapDetent::F30, "30"},
    {FlapDetent::F40, "40"},
}};

void require(std::vector<FieldError>& out, bool ok, std::string_view prefix, const char* field,
             const char* message) {
    if (!ok) {
        out.push_back({std::string(prefix) + field, message});
    }
}

}  // namespace

std::string_view to_string(FlapDetent detent) {
    for (const auto& [d, name] : kFlapNames) {
        if (d == detent) return name;
    }
    return "?";
}

FlapDetent flap_detent_from_string(std::string_view name) {
    for (const auto& [d, n] : kFlapNames) {
        if (n == name) return d;
    }
    throw ValidationError("flap_setting", "unknown flap detent '" + std::string(name) + "'");
}

std::vector<FieldError> validate(const AircraftParams& a, std::string_view prefix) {
    std::vector<FieldError> out;
    require(out, std::isfinite(a.mass) && a.mass > 0.0, prefix, "mass", "must be > 0");
    require(out, std::isfinite(a.wing_area) && a.wing_area > 0.0, prefix, "wing_area", "must be > 0");
    require(out, std::isfinite(a.drag_coefficient_ground) && a.drag_coefficient_ground >= 0.0, prefix,
            "drag_coefficient_ground", "must be >= 0");
    require(out, std::isfinite(a.lift_coefficient_ground) && a.lift_coefficient_ground >= 0.0, prefix,
            "lift_coefficient_ground", "must be >= 0");
    require(out, std::isfinite(a.thrust_speed_slope) && a.thrust_speed_slope >= 0.0, prefix,
            "thrust_speed_slope", "must be >= 0");
    require(out, std::isfinite(a.idle_thrust) && a.idle_thrust >= 0.0, prefix, "idle_thrust",
            "must be >= 0");
    require(out, std::isfinite(a.max_static_thrust) && a.max_static_thrust > a.idle_thrust, prefix,
            "max_static_thrust", "must exceed idle_thrust");
    require(out, std::isfinite(a.rolling_friction_mu) && a.rolling_friction_mu >= 0.0, prefix,
            "rolling_friction_mu", "must be >= 0");
    require(out,
            std::isfinite(a.braking_friction_mu) && a.braking_friction_mu > a.rolling_friction_mu &&
                a.braking_friction_mu <= 1.0,
            prefix, "braking_friction_mu", "must satisfy rolling_friction_mu < braking_friction_mu <= 1");
    return out;
}

std::vector<FieldError> validate(const RunwayParams& r, std::string_view prefix) {
    std::vector<FieldError> out;
    require(out, std::isfinite(r.length) && r.length > 0.0, prefix, "length", "must be > 0");
    require(out, std::isfinite(r.slope) && std::abs(r.slope) < 0.05, prefix, "slope",
            "must satisfy |slope| < 0.05 rad");
    require(out, std::isfinite(r.elevation), prefix, "elevation", "must be finite");
    require(out, std::isfinite(r.headwind) && std::abs(r.headwind) <= 25.0, prefix, "headwind",
            "must lie within [-25, 25] m/s");
    return out;
}

std::vector<FieldError> validate(const AtmosphereParams& a, std::string_view prefix) {
    std::vector<FieldError> out;
    require(out, std::isfinite(a.air_density) && a.air_density > 0.5 && a.air_density <= 1.5, prefix,
            "air_density", "must lie within (0.5, 1.5] kg/m^3");
    require(out, std::isfinite(a.temperature) && a.temperature > 0.0, prefix, "temperature",
            "must be > 0 K");
    require(out, a.gravity == kStandardGravity, prefix, "gravity", "is fixed at 9.80665 m/s^2");
    return out;
}

double thrust_force(double ground_speed, double throttle_fraction, const AircraftParams& a) {
    const double lapsed = std::max(a.max_static_thrust - a.thrust_speed_slope * ground_speed,
                                   0.5 * a.max_static_thrust);
    return throttle_fraction * lapsed + (1.0 - throttle_fraction) * a.idle_thrust;
}

double drag_force(double airspeed, const AtmosphereParams& atm, const AircraftParams& a) {
    const double v = std::max(airspeed, 0.0);
    return 0.5 * atm.air_density * v * v * a.wing_area * a.drag_coefficient_ground;
}

double lift_force(double airspeed, const AtmosphereParams& atm, const AircraftParams& a) {
    const double v = std::max(airspeed, 0.0);
    return 0.5 * atm.air_density * v * v * a.wing_area * a.lift_coefficient_ground;
}

double friction_force(double ground_speed, bool braking, const AtmosphereParams& atm,
                      const AircraftParams& a, const RunwayParams& r) {
    const double mu = braking ? a.braking_friction_mu : a.rolling_friction_mu;
    const double normal =
        a.mass * atm.gravity * std::cos(r.slope) - lift_force(ground_speed + r.headwind, atm, a);
    return mu * std::max(normal, 0.0);
}

double slope_gravity_force(const AircraftParams& a, const RunwayParams& r, const AtmosphereParams& atm) {
    return a.mass * atm.gravity * std::sin(r.slope);
}

double net_acceleration(double ground_speed, double throttle_fraction, bool braking,
                        const AircraftParams& a, const RunwayParams& r, const AtmosphereParams& atm) {
    const double airspeed = ground_speed + r.headwind;
    const double sum = thrust_force(ground_speed, throttle_fraction, a) - drag_force(airspeed, atm, a) -
                       friction_force(ground_speed, braking, atm, a, r) - slope_gravity_force(a, r, atm);
    return sum / a.mass;
}

}  // namespace runsafe
