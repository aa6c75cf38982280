// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "runsafe/forces.hpp"

namespace runsafe {

enum class AutobrakeDetent { AB1, AB2, AB3, Max };

std::string_view to_string(AutobrakeDetent detent);
AutobrakeDetent autobrake_detent_from_string(std::string_view name);

struct AeroCoefficients {
    double drag = 0.0;
    double lift = 0.0;
};

/// A named aircraft type: base parameters plus the flap and autobrake tables
/// the configuration screens pick from. All values are calibration inputs.
struct AircraftPreset {
    std::string name;
    AircraftParams base;
    std::map<FlapDetent, AeroCoefficients> flaps;
    std::map<AutobrakeDetent, double> autobrake_decel;  // m/s^2

    /// Copy of `base` with the aerodynamic coefficients of `detent`.
    AircraftParams configured(FlapDetent detent) const;
    double autobrake(AutobrakeDetent detent) const;
};

/// 737-800 class preset with CFM56-7B class thrust.
const AircraftPreset& b737_800();

AircraftPreset preset_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AircraftPreset& preset);
AircraftPreset load_preset(const std::filesystem::path& path);

void from_json(const nlohmann::json& j, RunwayParams& runway);
void to_json(nlohmann::json& j, const RunwayParams& runway);
void from_json(const nlohmann::json& j, AtmosphereParams& atmosphere);
void to_json(nlohmann::json& j, const AtmosphereParams& atmosphere);

}  // namespace runsafe
