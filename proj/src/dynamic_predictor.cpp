// SPDX-License-Identifier: Apache-2.0

#include "runsafe/dynamic_predictor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace runsafe {

std::string_view to_string(ProcedureStage stage) {
    switch (stage) {
        case ProcedureStage::TakeoffRoll: return "TakeoffRoll";
        case ProcedureStage::RtoBraking: return "RtoBraking";
        case ProcedureStage::PreApproach: return "PreApproach";
        case ProcedureStage::Approach: return "Approach";
        case ProcedureStage::Flare: return "Flare";
        case ProcedureStage::FreeRoll: return "FreeRoll";
        case ProcedureStage::LandingBraking: return "LandingBraking";
    }
    return "?";
}

std::string_view to_string(Confidence c) {
    switch (c) {
        case Confidence::Seeding: return "Seeding";
        case Confidence::Converging: return "Converging";
        case Confidence::Converged: return "Converged";
    }
    return "?";
}

namespace {

// Velocity quadratic fitted on regressor (t^2, t, 1).
QuadraticModel velocity_model(const RlsEstimator& rls) {
    const auto& th = rls.theta();
    return {2.0 * th[0], th[1], th[2]};
}

double remaining_to_stop(const RlsEstimator& rls, double t_now) {
    const QuadraticModel v = velocity_model(rls);
    const double t_stop = time_to_speed(v, 0.0, t_now);
    return std::max(distance_until(v, t_now, t_stop), 0.0);
}

}  // namespace

bool TakeoffStartDetector::detect(const TelemetryFrame& frame) {
    if (!started_ && frame.throttle_fraction > idle_threshold_) {
        started_ = true;
        return true;
    }
    return false;
}

TakeoffPredictor::TakeoffPredictor(TakeoffConfig config, IntegratorConfig integrator,
                                   TakeoffPredictorOptions options)
    : config_(std::move(config)),
      integrator_(integrator),
      options_(options),
      static_asdr_(compute_asdr(config_, integrator_)),
      static_bdr_at_v1_(static_asdr_.segments.back().distance),
      bdr_table_(config_, integrator_, std::max(1.5 * config_.v2, 100.0)),
      start_(options.idle_threshold) {}

std::optional<LinearModel> TakeoffPredictor::acceleration_model() const {
    if (!accel_rls_) return std::nullopt;
    return LinearModel{accel_rls_->theta()[0], accel_rls_->theta()[1]};
}

void TakeoffPredictor::track_spoolup(const TelemetryFrame& frame) {
    if (!frame.brakes_applied && last_brakes_applied_) brake_release_time_ = frame.timestamp;
    last_brakes_applied_ = frame.brakes_applied;

    if (!spool_end_time_) {
        // Plateau: throttle stays within the spool fraction of the value it
        // held when the plateau began.
        const double thr = frame.throttle_fraction;
        const double f = options_.spoolup_fraction;
        if (!spool_hold_since_ || thr < f * plateau_throttle_ || f * thr > plateau_throttle_) {
            spool_hold_since_ = frame.timestamp;
            plateau_throttle_ = thr;
            plateau_speed_ = frame.ground_speed;
        } else if (frame.timestamp - *spool_hold_since_ >= options_.spoolup_hold) {
            spool_end_time_ = *spool_hold_since_;
            spool_end_speed_ = plateau_speed_;
            if (frame.brakes_applied) {
                roll_pending_ = true;
            } else if (brake_release_time_ && *brake_release_time_ > *spool_end_time_) {
                spool_end_time_ = brake_release_time_;
                spool_end_speed_ = 0.0;
            }
        }
    }
    // Standing start: the roll begins at brake release, after the spool.
    if (roll_pending_ && !frame.brakes_applied) {
        roll_pending_ = false;
        spool_end_time_ = frame.timestamp;
        spool_end_speed_ = frame.ground_speed;
    }
}

StepResult TakeoffPredictor::step(const TelemetryFrame& frame) {
    StepResult out;
    if (!start_.started()) {
        if (!start_.detect(frame)) {
            return out;
        }
        out.events.takeoff_started = true;
        t_start_ = frame.timestamp;
        position_start_ = frame.distance_along_runway;
    }
    track_spoolup(frame);

    if (!rto_ && frame.on_ground && frame.brakes_applied &&
        frame.throttle_fraction <= options_.idle_threshold) {
        RtoState rto;
        rto.t_start = frame.timestamp;
        rto.static_reference = (frame.distance_along_runway - position_start_) +
                               compute_bdr(frame.ground_speed, config_, integrator_);
        rto_ = std::move(rto);
        out.events.rto_detected = true;
    }

    out.snapshot = rto_ ? rto_step(frame, out.events) : takeoff_step(frame, out.events);
    return out;
}

PredictionSnapshot TakeoffPredictor::make_snapshot(const TelemetryFrame& frame, ProcedureStage stage,
                                                   double stop_position, double static_reference,
                                                   Confidence confidence) const {
    PredictionSnapshot s;
    s.timestamp = frame.timestamp;
    s.procedure_stage = stage;
    s.position = frame.distance_along_runway;
    s.ground_speed = frame.ground_speed;
    s.stop_position = stop_position;
    s.stop_margin = config_.runway.length - stop_position;
    s.dynamic_required_distance = stop_position - position_start_;
    s.static_reference = static_reference;
    s.delta_from_static = (s.dynamic_required_distance - static_reference) / static_reference;
    s.bdr = bdr_table_(frame.ground_speed);
    s.confidence = confidence;
    return s;
}

PredictionSnapshot TakeoffPredictor::takeoff_step(const TelemetryFrame& frame, PredictorEvents& events) {
    const double elapsed = frame.timestamp - t_start_;
    const double static_total = static_asdr_.total;
    const double allowance = config_.v1 * integrator_.reaction_time_at_v1 + static_bdr_at_v1_;

    if (!v1_reached_ && frame.ground_speed >= config_.v1) {
        v1_reached_ = true;
        events.v1_reached = true;
    }

    if (!accel_rls_) {
        if (elapsed >= options_.seed_window_start && elapsed <= options_.seed_window_end) {
            seed_samples_.push_back({frame.timestamp, frame.acceleration});
        }
        if (elapsed <= options_.seed_window_end || seed_samples_.size() < 2) {
            return make_snapshot(frame, ProcedureStage::TakeoffRoll, position_start_ + static_total, static_total,
                                 Confidence::Seeding);
        }
        if (spool_end_time_ && *spool_end_time_ <= seed_samples_.front().t) {
            model_origin_ = *spool_end_time_;
            model_gamma_ = spool_end_speed_;
        } else {
            model_origin_ = t_start_;
            model_gamma_ = 0.0;
        }
        for (auto& s : seed_samples_) s.t -= model_origin_;
        accel_rls_ = seed_rls_from_linear(fit_linear_seed(seed_samples_), options_.seed_prior_scale);
        events.seed_complete = true;
    }

    const double tau = frame.timestamp - model_origin_;
    const std::array<double, 2> regressor{tau, 1.0};
    accel_rls_->update(regressor, frame.acceleration);

    const Confidence confidence =
        elapsed >= options_.takeoff_converged_after ? Confidence::Converged : Confidence::Converging;
    const double travelled = frame.distance_along_runway - position_start_;
    double remaining = 0.0;
    bool unreachable = false;
    if (!v1_reached_) {
        const QuadraticModel v{accel_rls_->theta()[0], accel_rls_->theta()[1], model_gamma_};
        try {
            // A model already past V1 has nothing left to accelerate through.
            const double t_v1 = v(tau) >= config_.v1 ? tau : time_to_speed(v, config_.v1, tau);
            remaining = std::max(distance_until(v, tau, t_v1), 0.0);
            last_remaining_ = remaining;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoRoot) throw;
            unreachable = true;
            remaining = last_remaining_.value_or(static_asdr_.segments.front().distance - travelled);
        }
    }
    auto snap = make_snapshot(frame, ProcedureStage::TakeoffRoll, position_start_ + travelled + remaining + allowance,
                              static_total, unreachable ? Confidence::Converging : confidence);
    snap.target_unreachable = unreachable;
    return snap;
}

PredictionSnapshot TakeoffPredictor::rto_step(const TelemetryFrame& frame, PredictorEvents& events) {
    RtoState& rto = *rto_;
    const double tau = frame.timestamp - rto.t_start;
    const double position = frame.distance_along_runway;

    if (frame.ground_speed <= options_.stopped_speed) {
        if (!rto.stopped) {
            rto.stopped = true;
            events.stopped = true;
        }
        rto.last_stop_position = position;
        return make_snapshot(frame, ProcedureStage::RtoBraking, position, rto.static_reference,
                             Confidence::Converged);
    }

    const std::array<double, 3> regressor{tau * tau, tau, 1.0};
    rto.rls.update(regressor, frame.ground_speed);

    if (rto.rls.sample_count() < options_.rto_min_samples) {
        const double stop = position + bdr_table_(frame.ground_speed);
        rto.last_stop_position = stop;
        return make_snapshot(frame, ProcedureStage::RtoBraking, stop, rto.static_reference, Confidence::Seeding);
    }

    const Confidence confidence =
        tau >= options_.rto_converged_after ? Confidence::Converged : Confidence::Converging;
    try {
        const double stop = position + remaining_to_stop(rto.rls, tau);
        rto.last_stop_position = stop;
        return make_snapshot(frame, ProcedureStage::RtoBraking, stop, rto.static_reference, confidence);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRoot) throw;
        auto snap = make_snapshot(frame, ProcedureStage::RtoBraking,
                                  rto.last_stop_position.value_or(position + bdr_table_(frame.ground_speed)),
                                  rto.static_reference, Confidence::Converging);
        snap.target_unreachable = true;
        return snap;
    }
}

std::optional<ProcedureStage> detect_landing_stage(const TelemetryFrame& frame) {
    if (frame.on_ground) {
        return frame.brakes_applied ? ProcedureStage::LandingBraking : ProcedureStage::FreeRoll;
    }
    const double h = frame.height_agl;
    if (h > kPreApproachTopHeight) return std::nullopt;
    if (h > kApproachTopHeight) return ProcedureStage::PreApproach;
    if (h > kFlareTopHeight) return ProcedureStage::Approach;
    return ProcedureStage::Flare;
}

LandingPredictor::LandingPredictor(LandingConfig config, LandingPredictorOptions options)
    : config_(std::move(config)),
      options_(options),
      static_ldr_(compute_ldr(config_)),
      braking_decel_(effective_autobrake_decel(config_)),
      pre_approach_{MovingAverage(options.pre_approach_window), MovingAverage(options.pre_approach_window)},
      approach_{MovingAverage(options.approach_window), MovingAverage(options.approach_window)},
      flare_{MovingAverage(options.flare_window), MovingAverage(options.flare_window)} {}

const LandingPredictor::Averages& LandingPredictor::averages_for(ProcedureStage stage) const {
    switch (stage) {
        case ProcedureStage::PreApproach: return pre_approach_;
        case ProcedureStage::Approach: return approach_;
        default: return flare_;
    }
}

double LandingPredictor::downstream_after_approach(double speed) const {
    return flare_distance(speed, config_.flare_duration) + free_roll_distance(speed, config_.free_roll_duration) +
           braking_distance(kTouchdownSpeedFraction * speed, braking_decel_);
}

StepResult LandingPredictor::step(const TelemetryFrame& frame) {
    StepResult out;
    for (Averages* avg : {&pre_approach_, &approach_, &flare_}) {
        avg->ground_speed.update(frame.ground_speed);
        avg->vertical_speed.update(frame.vertical_speed);
    }

    // Stages only advance; on_ground overrides a small reported height.
    const auto detected = detect_landing_stage(frame);
    if (detected && (!stage_ || *detected > *stage_)) {
        const bool first = !stage_;
        const auto previous = stage_;
        stage_ = detected;
        stage_entry_time_ = frame.timestamp;
        if (first) out.events.below_300ft = true;
        const bool was_airborne = !previous || *previous < ProcedureStage::FreeRoll;
        if (was_airborne && *stage_ >= ProcedureStage::FreeRoll) out.events.touchdown = true;
        if (*stage_ == ProcedureStage::LandingBraking) {
            out.events.braking_started = true;
            t_braking_ = frame.timestamp;
            braking_rls_.emplace(3, kDiffusePriorScale);
        }
    }
    if (!stage_) {
        return out;
    }

    const ProcedureStage stage = *stage_;
    const Averages& avg = averages_for(stage);
    const double gs = avg.ground_speed.mean();
    const double sink = std::abs(avg.vertical_speed.mean());
    const double h = frame.height_agl;
    const double in_stage = frame.timestamp - stage_entry_time_;
    const double position = frame.distance_along_runway;

    Confidence confidence = avg.ground_speed.full() ? Confidence::Converged : Confidence::Converging;
    std::optional<double> remaining;
    bool unreachable = false;

    const bool airborne = stage < ProcedureStage::FreeRoll;
    if (airborne && sink < options_.divergence_guard) {
        confidence = Confidence::Converging;
    } else {
        switch (stage) {
            case ProcedureStage::PreApproach:
                remaining = gs * std::max(h - kApproachTopHeight, 0.0) / sink +
                            approach_distance(config_.glide_path) + downstream_after_approach(gs);
                break;
            case ProcedureStage::Approach:
                remaining = gs * std::max(h - kFlareTopHeight, 0.0) / sink + downstream_after_approach(gs);
                break;
            case ProcedureStage::Flare: {
                // The sink rate decays through the flare, so height/sink alone
                // underestimates the remaining time; the flare budget bounds it.
                const double t_rem = std::max(std::max(h, 0.0) / sink, config_.flare_duration - in_stage);
                remaining = gs * t_rem + free_roll_distance(gs, config_.free_roll_duration) +
                            braking_distance(kTouchdownSpeedFraction * gs, braking_decel_);
                break;
            }
            case ProcedureStage::FreeRoll:
                remaining = gs * std::max(config_.free_roll_duration - in_stage, 0.0) +
                            braking_distance(gs, braking_decel_);
                break;
            case ProcedureStage::LandingBraking: {
                const double tau = frame.timestamp - t_braking_;
                if (frame.ground_speed <= options_.stopped_speed) {
                    if (!stopped_) {
                        stopped_ = true;
                        out.events.stopped = true;
                    }
                    remaining = 0.0;
                    confidence = Confidence::Converged;
                    break;
                }
                const std::array<double, 3> regressor{tau * tau, tau, 1.0};
                braking_rls_->update(regressor, frame.ground_speed);
                if (braking_rls_->sample_count() < options_.braking_min_samples) {
                    remaining = braking_distance(gs, braking_decel_);
                    confidence = Confidence::Seeding;
                    break;
                }
                confidence = tau >= options_.braking_converged_after ? Confidence::Converged
                                                                     : Confidence::Converging;
                try {
                    remaining = remaining_to_stop(*braking_rls_, tau);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::NoRoot) throw;
                    unreachable = true;
                    confidence = Confidence::Converging;
                }
                break;
            }
            default: break;
        }
    }

    double stop_position = 0.0;
    if (remaining) {
        stop_position = position + *remaining;
        last_stop_position_ = stop_position;
    } else {
        stop_position = last_stop_position_.value_or(static_ldr_.total);
    }

    PredictionSnapshot s;
    s.timestamp = frame.timestamp;
    s.procedure_stage = stage;
    s.position = position;
    s.ground_speed = frame.ground_speed;
    s.stop_position = stop_position;
    s.stop_margin = config_.runway.length - stop_position;
    s.dynamic_required_distance = stop_position;
    s.static_reference = static_ldr_.total;
    s.delta_from_static = (stop_position - static_ldr_.total) / static_ldr_.total;
    s.confidence = confidence;
    s.target_unreachable = unreachable;
    out.snapshot = s;
    return out;
}

}  // namespace runsafe
