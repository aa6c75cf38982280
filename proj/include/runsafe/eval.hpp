// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "runsafe/flight_sim.hpp"
#include "runsafe/procedure_config.hpp"

namespace runsafe {

/// Dimensions covered by the shipped direction-number table.
inline constexpr std::size_t kSobolMaxDimension = 12;

/// First `n` points of the unscrambled Sobol sequence in [0,1)^d, skipping
/// the all-zero origin. Throws DimensionLimit past kSobolMaxDimension.
std::vector<std::vector<double>> sobol_unit(std::size_t n, std::size_t d);

struct DoeDimension {
    std::string path;  // see apply_dimension for the accepted names
    double lower = 0.0;
    double upper = 1.0;
};

struct DoeThresholds {
    std::optional<double> max_abs_mean_deviation;
    std::optional<double> max_deviation_std;
    std::optional<double> min_conservative_fraction;  // share of runs with static >= truth
    std::optional<double> min_mean_deviation;
    std::optional<double> max_mean_deviation;
    std::optional<double> max_median_convergence;         // takeoff, s from start
    std::optional<double> max_median_rto_convergence;     // s from rejection
    std::optional<double> max_median_braking_convergence; // landing, s from braking start
};

struct DoeSpec {
    Procedure procedure = Procedure::Takeoff;
    std::vector<DoeDimension> dimensions;
    std::size_t num_points = 200;
    std::uint64_t seed = 1;
    NoiseStd noise_std;           // zero: simulator and static share parameters exactly
    double convergence_band = 0.02;
    unsigned threads = 0;         // 0 = hardware concurrency
    DoeThresholds thresholds;

    static DoeSpec defaults(Procedure procedure);
};

std::vector<FieldError> validate(const DoeSpec& spec);
DoeSpec doe_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DoeSpec& spec);

/// Points mapped onto the spec bounds, one vector per point in dimension order.
std::vector<std::vector<double>> sobol_points(const DoeSpec& spec);

/// Writes one DOE coordinate into a scenario. Accepted paths: aircraft.mass,
/// runway.headwind, runway.slope, runway.elevation, atmosphere.air_density,
/// v1 (vr = v1+3, v2 = v1+8), vref (vapp = vref+2), autobrake_detent
/// (floored into AB1..MAX). Throws ValidationError for anything else.
void apply_dimension(Scenario& scenario, const std::string& path, double value);

/// Baseline scenario for a DOE point before the coordinates are applied.
Scenario base_scenario(Procedure procedure);

struct DoeRow {
    std::size_t index = 0;
    std::vector<double> point;
    bool feasible = true;
    std::string failure;
    double static_total = 0.0;
    double truth_total = 0.0;
    double deviation = 0.0;                     // (static - truth) / truth
    std::optional<double> convergence;          // takeoff roll or landing braking
    std::optional<double> rto_convergence;      // takeoff only
    double final_prediction_error = 0.0;        // last dynamic value vs truth, fraction
    // Wall-clock figures, kept out of the deterministic CSV.
    double accel_latency_mean_ms = 0.0;
    double accel_latency_std_ms = 0.0;
    double braking_latency_mean_ms = 0.0;
    double braking_latency_std_ms = 0.0;
};

struct Percentiles {
    std::size_t count = 0;
    double p50 = 0.0;
    double p90 = 0.0;
    double max = 0.0;
};

struct DoeSummary {
    std::size_t runs = 0;
    std::size_t infeasible = 0;
    double deviation_mean = 0.0;
    double deviation_std = 0.0;  // sample standard deviation
    double deviation_min = 0.0;
    double deviation_max = 0.0;
    double conservative_fraction = 0.0;
    Percentiles convergence;
    Percentiles rto_convergence;
    std::size_t never_converged = 0;
};

struct RunReport {
    DoeSpec spec;
    std::vector<DoeRow> rows;
    DoeSummary summary;
};

RunReport run_doe(const DoeSpec& spec);
DoeSummary summarize(const std::vector<DoeRow>& rows);

/// Human-readable threshold violations; empty when everything passes.
std::vector<std::string> check_thresholds(const DoeSummary& summary, const DoeThresholds& thresholds);

std::string rows_csv(const RunReport& report);
std::string latency_csv(const RunReport& report);
/// Deviation histogram bins of `width` (fraction) for external plotting.
std::string histogram_csv(const std::vector<DoeRow>& rows, double width = 0.005);
nlohmann::json summary_json(const RunReport& report);

/// Timestamped prediction series.
struct SeriesPoint {
    double t = 0.0;
    double value = 0.0;
};

/// Earliest t after which every later value stays within band*|final| of
/// `final_value`. Throws NeverConverged.
double convergence_time(const std::vector<SeriesPoint>& series, double final_value, double band = 0.02);

struct LatencyStats {
    std::size_t samples = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double median_ms = 0.0;
};

struct LatencyReport {
    LatencyStats acceleration;
    LatencyStats braking;
    LatencyStats noop;  // empty timed section, the timer floor
};

/// Replays simulated takeoff/RTO and landing frames through the predictors
/// until each update kind has at least `n_frames` samples.
LatencyReport latency_bench(std::size_t n_frames);
nlohmann::json to_json(const LatencyReport& report);

}  // namespace runsafe
