// SPDX-License-Identifier: Apache-2.0

#include "runsafe/errors.hpp"

namespace runsafe {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::DegenerateDesign: return "DegenerateDesign";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::IllegalTransition: return "IllegalTransition";
        case ErrorCode::NoPriorValue: return "NoPriorValue";
        case ErrorCode::BindFailure: return "BindFailure";
        case ErrorCode::ScenarioInfeasible: return "ScenarioInfeasible";
        case ErrorCode::NeverConverged: return "NeverConverged";
        case ErrorCode::DimensionLimit: return "DimensionLimit";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {
std::string join_fields(const std::vector<FieldError>& fields) {
    std::string out = "invalid configuration:";
    for (const auto& f : fields) {
        out += " ";
        out += f.field;
        out += " (";
        out += f.message;
        out += ");";
    }
    return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<FieldError> fields)
    : Error(ErrorCode::ValidationError, join_fields(fields)), fields_(std::move(fields)) {}

ValidationError::ValidationError(std::string field, std::string message)
    : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

}  // namespace runsafe
