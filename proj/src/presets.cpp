// SPDX-License-Identifier: Apache-2.0

#include "runsafe/presets.hpp"

#include <fstream>

namespace runsafe {

using nlohmann::json;

std::string_view to_string(AutobrakeDetent detent) {
    switch (detent) {
        case AutobrakeDetent::AB1: return "AB1";
        case AutobrakeDetent::AB2: return "AB2";
        case AutobrakeDetent::AB3: return "AB3";
        case AutobrakeDetent::Max: return "MAX";
    }
    return "?";
}

AutobrakeDetent autobrake_detent_from_string(std::string_view name) {
    if (name == "AB1") return AutobrakeDetent::AB1;
    if (name == "AB2") return AutobrakeDetent::AB2;
    if (name == "AB3") return AutobrakeDetent::AB3;
    if (name == "MAX") return AutobrakeDetent::Max;
    throw ValidationError("autobrake", "unknown autobrake detent '" + std::string(name) + "'");
}

AircraftParams AircraftPreset::configured(FlapDetent detent) const {
    const auto it = flaps.find(detent);
    if (it == flaps.end()) {
        throw ValidationError(
            {{"flap_setting", "detent " + std::string(to_string(detent)) + " not in preset " + name}});
    }
    AircraftParams p = base;
    p.flap_setting = detent;
    p.drag_coefficient_ground = it->second.drag;
    p.lift_coefficient_ground = it->second.lift;
    return p;
}

double AircraftPreset::autobrake(AutobrakeDetent detent) const {
    const auto it = autobrake_decel.find(detent);
    if (it == autobrake_decel.end()) {
        throw ValidationError(
            {{"autobrake", "detent " + std::string(to_string(detent)) + " not in preset " + name}});
    }
    return it->second;
}

const AircraftPreset& b737_800() {
    static const AircraftPreset preset = [] {
        AircraftPreset p;
        p.name = "B737-800";
        p.base = AircraftParams{};
        p.flaps = {
            {FlapDetent::F1, {0.070, 0.45}},  {FlapDetent::F5, {0.075, 0.55}},
            {FlapDetent::F10, {0.080, 0.62}}, {FlapDetent::F15, {0.085, 0.70}},
            {FlapDetent::F25, {0.095, 0.80}}, {FlapDetent::F30, {0.105, 0.90}},
            {FlapDetent::F40, {0.120, 0.95}},
        };
        p.autobrake_decel = {
            {AutobrakeDetent::AB1, 1.2},
            {AutobrakeDetent::AB2, 1.5},
            {AutobrakeDetent::AB3, 2.2},
            {AutobrakeDetent::Max, 3.0},
        };
        p.base = p.configured(FlapDetent::F5);
        return p;
    }();
    return preset;
}

AircraftPreset preset_from_json(const json& j) {
    AircraftPreset p;
    p.name = j.at("name").get<std::string>();
    const auto& a = j.at("aircraft");
    p.base.mass = a.at("mass").get<double>();
    p.base.wing_area = a.at("wing_area").get<double>();
    p.base.max_static_thrust = a.at("max_static_thrust").get<double>();
    p.base.thrust_speed_slope = a.at("thrust_speed_slope").get<double>();
    p.base.idle_thrust = a.at("idle_thrust").get<double>();
    p.base.rolling_friction_mu = a.at("rolling_friction_mu").get<double>();
    p.base.braking_friction_mu = a.at("braking_friction_mu").get<double>();
    for (const auto& [detent, coeffs] : j.at("flaps").items()) {
        p.flaps[flap_detent_from_string(detent)] = {coeffs.at("cd").get<double>(),
                                                     coeffs.at("cl").get<double>()};
    }
    for (const auto& [detent, decel] : j.at("autobrake").items()) {
        p.autobrake_decel[autobrake_detent_from_string(detent)] = decel.get<double>();
    }
    const auto default_flap = flap_detent_from_string(a.value("flap_setting", std::string("5")));
    p.base = p.configured(default_flap);
    if (auto errors = validate(p.base); !errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return p;
}

json to_json(const AircraftPreset& p) {
    json flaps = json::object();
    for (const auto& [detent, c] : p.flaps) {
        flaps[std::string(to_string(detent))] = {{"cd", c.drag}, {"cl", c.lift}};
    }
    json autobrake = json::object();
    for (const auto& [detent, decel] : p.autobrake_decel) {
        autobrake[std::string(to_string(detent))] = decel;
    }
    return {
        {"name", p.name},
        {"aircraft",
         {{"mass", p.base.mass},
          {"wing_area", p.base.wing_area},
          {"max_static_thrust", p.base.max_static_thrust},
          {"thrust_speed_slope", p.base.thrust_speed_slope},
          {"idle_thrust", p.base.idle_thrust},
          {"rolling_friction_mu", p.base.rolling_friction_mu},
          {"braking_friction_mu", p.base.braking_friction_mu},
          {"flap_setting", std::string(to_string(p.base.flap_setting))}}},
        {"flaps", flaps},
        {"autobrake", autobrake},
    };
}

AircraftPreset load_preset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open preset file " + path.string());
    }
    return preset_from_json(json::parse(in));
}

void from_json(const json& j, RunwayParams& r) {
    r.length = j.value("length", r.length);
    r.slope = j.value("slope", r.slope);
    r.elevation = j.value("elevation", r.elevation);
    r.headwind = j.value("headwind", r.headwind);
}

void to_json(json& j, const RunwayParams& r) {
    j = {{"length", r.length}, {"slope", r.slope}, {"elevation", r.elevation}, {"headwind", r.headwind}};
}

void from_json(const json& j, AtmosphereParams& a) {
    a.air_density = j.value("air_density", a.air_density);
    a.temperature = j.value("temperature", a.temperature);
}

void to_json(json& j, const AtmosphereParams& a) {
    j = {{"air_density", a.air_density}, {"temperature", a.temperature}, {"gravity", a.gravity}};
}

}  // namespace runsafe
