// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "runsafe/estimators.hpp"
#include "runsafe/frame.hpp"
#include "runsafe/static_predictor.hpp"

namespace runsafe {

enum class ProcedureStage { TakeoffRoll, RtoBraking, PreApproach, Approach, Flare, FreeRoll, LandingBraking };
enum class Confidence { Seeding, Converging, Converged };

std::string_view to_string(ProcedureStage stage);
std::string_view to_string(Confidence confidence);

struct PredictionSnapshot {
    double timestamp = 0.0;
    ProcedureStage procedure_stage = ProcedureStage::TakeoffRoll;
    double dynamic_required_distance = 0.0;  // m from the procedure origin
    double stop_position = 0.0;              // m from threshold
    double stop_margin = 0.0;                // m, positive inside the runway
    double delta_from_static = 0.0;          // fraction of the static reference
    double static_reference = 0.0;           // m, the static figure delta is taken against
    double bdr = 0.0;                        // m, takeoff only
    double position = 0.0;                   // m from threshold
    double ground_speed = 0.0;               // m/s
    Confidence confidence = Confidence::Seeding;
    bool target_unreachable = false;         // current fit never reaches V1 / a stop
};

/// Discrete happenings detected while processing one frame.
struct PredictorEvents {
    bool takeoff_started = false;
    bool seed_complete = false;
    bool rto_detected = false;
    bool v1_reached = false;
    bool below_300ft = false;
    bool touchdown = false;
    bool braking_started = false;
    bool stopped = false;
};

struct StepResult {
    std::optional<PredictionSnapshot> snapshot;
    PredictorEvents events;
};

struct TakeoffPredictorOptions {
    double idle_threshold = 0.1;
    double seed_window_start = 8.0;   // s after takeoff start
    double seed_window_end = 10.0;
    double seed_prior_scale = kDefaultSeedPriorScale;
    double spoolup_fraction = 0.95;   // of the commanded (peak) throttle
    double spoolup_hold = 1.0;        // s
    std::size_t rto_min_samples = 5;
    double takeoff_converged_after = 15.0;  // s after takeoff start
    double rto_converged_after = 8.5;       // s after rejection
    double stopped_speed = 0.1;             // m/s
};

/// Latches the first frame whose throttle leaves idle.
class TakeoffStartDetector {
public:
    explicit TakeoffStartDetector(double idle_threshold = 0.1) : idle_threshold_(idle_threshold) {}
    bool detect(const TelemetryFrame& frame);
    bool started() const { return started_; }

private:
    double idle_threshold_;
    bool started_ = false;
};

/// Per-frame dynamic ASD prediction for one takeoff session, including the
/// braking estimate after a rejection.
class TakeoffPredictor {
public:
    TakeoffPredictor(TakeoffConfig config, IntegratorConfig integrator, TakeoffPredictorOptions options = {});

    StepResult step(const TelemetryFrame& frame);

    const DistanceBreakdown& static_result() const { return static_asdr_; }
    const TakeoffConfig& config() const { return config_; }
    bool started() const { return start_.started(); }
    bool seeded() const { return accel_rls_.has_value(); }
    bool rejected() const { return rto_.has_value(); }
    double start_time() const { return t_start_; }
    double rto_time() const { return rto_ ? rto_->t_start : 0.0; }
    /// (alpha, beta) of the acceleration model, once seeded.
    std::optional<LinearModel> acceleration_model() const;

private:
    struct RtoState {
        double t_start = 0.0;
        double static_reference = 0.0;
        RlsEstimator rls{3, kDiffusePriorScale};
        std::optional<double> last_stop_position;
        bool stopped = false;
    };

    PredictionSnapshot takeoff_step(const TelemetryFrame& frame, PredictorEvents& events);
    PredictionSnapshot rto_step(const TelemetryFrame& frame, PredictorEvents& events);
    PredictionSnapshot make_snapshot(const TelemetryFrame& frame, ProcedureStage stage, double stop_position,
                                     double static_reference, Confidence confidence) const;
    void track_spoolup(const TelemetryFrame& frame);

    TakeoffConfig config_;
    IntegratorConfig integrator_;
    TakeoffPredictorOptions options_;
    DistanceBreakdown static_asdr_;
    double static_bdr_at_v1_ = 0.0;
    BrakingDistanceTable bdr_table_;

    TakeoffStartDetector start_;
    double t_start_ = 0.0;
    double position_start_ = 0.0;
    std::optional<double> spool_hold_since_;
    double plateau_throttle_ = 0.0;
    double plateau_speed_ = 0.0;
    bool last_brakes_applied_ = false;
    std::optional<double> brake_release_time_;
    bool roll_pending_ = false;
    std::optional<double> spool_end_time_;
    double spool_end_speed_ = 0.0;

    std::vector<TimedSample> seed_samples_;
    std::optional<RlsEstimator> accel_rls_;
    double model_origin_ = 0.0;
    double model_gamma_ = 0.0;
    std::optional<double> last_remaining_;
    bool v1_reached_ = false;

    std::optional<RtoState> rto_;
};

struct LandingPredictorOptions {
    std::size_t pre_approach_window = 40;
    std::size_t approach_window = 20;
    std::size_t flare_window = 8;
    double divergence_guard = 0.05;          // m/s of vertical speed
    std::size_t braking_min_samples = 10;
    double braking_converged_after = 4.0;    // s after braking start
    double stopped_speed = 0.1;              // m/s
};

/// Stage from (height, ground, brakes) alone; nullopt above 300 ft.
std::optional<ProcedureStage> detect_landing_stage(const TelemetryFrame& frame);

/// Per-frame dynamic landing distance prediction.
class LandingPredictor {
public:
    LandingPredictor(LandingConfig config, LandingPredictorOptions options = {});

    StepResult step(const TelemetryFrame& frame);

    const DistanceBreakdown& static_result() const { return static_ldr_; }
    const LandingConfig& config() const { return config_; }
    std::optional<ProcedureStage> stage() const { return stage_; }
    double braking_start_time() const { return t_braking_; }

private:
    struct Averages {
        MovingAverage ground_speed;
        MovingAverage vertical_speed;
    };

    double downstream_after_approach(double speed) const;
    const Averages& averages_for(ProcedureStage stage) const;

    LandingConfig config_;
    LandingPredictorOptions options_;
    DistanceBreakdown static_ldr_;
    double braking_decel_ = 0.0;

    Averages pre_approach_;
    Averages approach_;
    Averages flare_;

    std::optional<ProcedureStage> stage_;
    double stage_entry_time_ = 0.0;
    double t_braking_ = 0.0;
    std::optional<RlsEstimator> braking_rls_;
    std::optional<double> last_stop_position_;
    bool stopped_ = false;
};

}  // namespace runsafe
