// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "runsafe/presets.hpp"
#include "runsafe/static_predictor.hpp"

namespace runsafe {

enum class Procedure { Takeoff, Landing };

std::string_view to_string(Procedure procedure);
Procedure procedure_from_string(std::string_view name);

struct TakeoffRequest {
    TakeoffConfig config;
    IntegratorConfig integrator;
};

/// Parses a takeoff payload over `preset` and checks every invariant. Throws
/// ValidationError listing each bad or missing field.
TakeoffRequest parse_takeoff(const nlohmann::json& payload, const AircraftPreset& preset = b737_800());
LandingConfig parse_landing(const nlohmann::json& payload, const AircraftPreset& preset = b737_800());

nlohmann::json to_json(const TakeoffRequest& request);
nlohmann::json to_json(const LandingConfig& config);

}  // namespace runsafe
