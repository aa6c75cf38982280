// SPDX-License-Identifier: Apache-2.0

#include "runsafe/procedure_config.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace runsafe {

using nlohmann::json;

std::string_view to_string(Procedure p) { return p == Procedure::Takeoff ? "takeoff" : "landing"; }

Procedure procedure_from_string(std::string_view name) {
    if (name == "takeoff") return Procedure::Takeoff;
    if (name == "landing") return Procedure::Landing;
    throw ValidationError("procedure", "must be 'takeoff' or 'landing'");
}

namespace {

/// Collects field errors while reading a payload.
class Reader {
public:
    explicit Reader(const json& j) : j_(j) {}

    void number(std::string_view key, double& out, bool required) { number_at(j_, key, std::string(key), out, required); }

    void nested_number(std::string_view object, std::string_view key, double& out) {
        if (!j_.contains(object)) return;
        const json& o = j_.at(std::string(object));
        if (!o.is_object()) {
            fail(std::string(object), "must be an object");
            return;
        }
        number_at(o, key, std::string(object) + "." + std::string(key), out, false);
    }

    std::string string(std::string_view key, std::string fallback) {
        if (!j_.contains(key)) return fallback;
        const json& v = j_.at(std::string(key));
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        fail(std::string(key), "must be a string");
        return fallback;
    }

    void fail(std::string field, std::string message) { errors_.push_back({std::move(field), std::move(message)}); }
    std::vector<FieldError>& errors() { return errors_; }

private:
    void number_at(const json& o, std::string_view key, const std::string& field, double& out, bool required) {
        if (!o.contains(key)) {
            if (required) fail(field, "is required");
            return;
        }
        const json& v = o.at(std::string(key));
        if (!v.is_number()) {
            fail(field, "must be a number");
            return;
        }
        out = v.get<double>();
    }

    const json& j_;
    std::vector<FieldError> errors_;
};

void read_environment(Reader& r, RunwayParams& runway, AtmosphereParams& atmosphere, AircraftParams& aircraft) {
    r.number("mass", aircraft.mass, false);
    r.nested_number("runway", "length", runway.length);
    r.nested_number("runway", "slope", runway.slope);
    r.nested_number("runway", "elevation", runway.elevation);
    r.nested_number("runway", "headwind", runway.headwind);
    r.nested_number("atmosphere", "air_density", atmosphere.air_density);
    r.nested_number("atmosphere", "temperature", atmosphere.temperature);
}

AircraftParams configured_aircraft(Reader& r, const AircraftPreset& preset, std::string_view default_flap) {
    const std::string flap = r.string("flap_setting", std::string(default_flap));
    try {
        return preset.configured(flap_detent_from_string(flap));
    } catch (const ValidationError& e) {
        for (const auto& f : e.fields()) r.fail(f.field, f.message);
        return preset.base;
    }
}

// Invariant checks name model fields; report them under the payload key.
std::string payload_field(const std::string& field) {
    if (field == "aircraft.mass") return "mass";
    if (field == "integrator.dt") return "dt";
    if (field == "integrator.reaction_time_at_v1") return "reaction_time";
    return field;
}

void finish(Reader& r, std::vector<FieldError> invariant_errors) {
    auto& errors = r.errors();
    for (auto& e : invariant_errors) {
        e.field = payload_field(e.field);
        const bool duplicate =
            std::any_of(errors.begin(), errors.end(), [&](const FieldError& x) { return x.field == e.field; });
        if (!duplicate) errors.push_back(std::move(e));
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
}

}  // namespace

TakeoffRequest parse_takeoff(const json& payload, const AircraftPreset& preset) {
    if (!payload.is_object()) throw ValidationError("config", "must be an object");
    Reader r(payload);
    TakeoffRequest req;
    req.config.aircraft = configured_aircraft(r, preset, "5");
    read_environment(r, req.config.runway, req.config.atmosphere, req.config.aircraft);
    r.number("v1", req.config.v1, true);
    r.number("vr", req.config.vr, true);
    r.number("v2", req.config.v2, true);
    r.number("reaction_time", req.integrator.reaction_time_at_v1, false);
    r.number("dt", req.integrator.dt, false);
    auto invariants = validate(req.config);
    for (auto& e : validate(req.integrator)) invariants.push_back(std::move(e));
    finish(r, std::move(invariants));
    return req;
}

LandingConfig parse_landing(const json& payload, const AircraftPreset& preset) {
    if (!payload.is_object()) throw ValidationError("config", "must be an object");
    Reader r(payload);
    LandingConfig c;
    c.aircraft = configured_aircraft(r, preset, "30");
    read_environment(r, c.runway, c.atmosphere, c.aircraft);
    r.number("vref", c.vref, true);
    c.vapp = c.vref;
    r.number("vapp", c.vapp, false);
    r.number("glide_path", c.glide_path, false);
    r.number("flare_duration", c.flare_duration, false);
    r.number("free_roll_duration", c.free_roll_duration, false);
    if (payload.contains("autobrake_decel")) {
        r.number("autobrake_decel", c.autobrake_decel, true);
    } else {
        const std::string detent = r.string("autobrake", "AB3");
        try {
            c.autobrake_decel = preset.autobrake(autobrake_detent_from_string(detent));
        } catch (const ValidationError& e) {
            for (const auto& f : e.fields()) r.fail(f.field, f.message);
        }
    }
    finish(r, validate(c));
    return c;
}

json to_json(const TakeoffRequest& req) {
    const auto& c = req.config;
    return {
        {"mass", c.aircraft.mass},
        {"flap_setting", std::string(to_string(c.aircraft.flap_setting))},
        {"runway", c.runway},
        {"atmosphere", {{"air_density", c.atmosphere.air_density}, {"temperature", c.atmosphere.temperature}}},
        {"v1", c.v1},
        {"vr", c.vr},
        {"v2", c.v2},
        {"reaction_time", req.integrator.reaction_time_at_v1},
        {"dt", req.integrator.dt},
    };
}

json to_json(const LandingConfig& c) {
    return {
        {"mass", c.aircraft.mass},
        {"flap_setting", std::string(to_string(c.aircraft.flap_setting))},
        {"runway", c.runway},
        {"atmosphere", {{"air_density", c.atmosphere.air_density}, {"temperature", c.atmosphere.temperature}}},
        {"vref", c.vref},
        {"vapp", c.vapp},
        {"glide_path", c.glide_path},
        {"flare_duration", c.flare_duration},
        {"free_roll_duration", c.free_roll_duration},
        {"autobrake_decel", c.autobrake_decel},
    };
}

}  // namespace runsafe
