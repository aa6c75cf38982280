// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace runsafe {

enum class ErrorCode {
    NonConvergence,
    DegenerateDesign,
    NoRoot,
    IllegalTransition,
    NoPriorValue,
    BindFailure,
    ScenarioInfeasible,
    NeverConverged,
    DimensionLimit,
    ValidationError,
    InfeasibleConfig,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Base for every error raised by the library. Carries a machine-readable code
/// so gateway messages and CLI exit paths can report it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct FieldError {
    std::string field;
    std::string message;
};

/// Raised by config validation; lists every offending field, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<FieldError> fields);
    ValidationError(std::string field, std::string message);
    const std::vector<FieldError>& fields() const noexcept { return fields_; }

private:
    std::vector<FieldError> fields_;
};

}  // namespace runsafe
