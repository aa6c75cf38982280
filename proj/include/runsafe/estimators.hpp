// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "runsafe/errors.hpp"

namespace runsafe {

/// a(t) = alpha * t + beta
struct LinearModel {
    double alpha = 0.0;
    double beta = 0.0;

    double operator()(double t) const { return alpha * t + beta; }
};

/// v(t) = alpha / 2 * t^2 + beta * t + gamma
struct QuadraticModel {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    double operator()(double t) const { return 0.5 * alpha * t * t + beta * t + gamma; }
    /// Antiderivative alpha/6 t^3 + beta/2 t^2 + gamma t.
    double integral(double t) const { return (alpha / 6.0 * t + beta / 2.0) * t * t + gamma * t; }
};

struct TimedSample {
    double t = 0.0;
    double value = 0.0;
};

/// Ordinary least-squares line through the samples. Throws DegenerateDesign
/// when fewer than two samples are given or all share one timestamp.
LinearModel fit_linear_seed(std::span<const TimedSample> samples);

/// Recursive least squares with unit forgetting factor: every past sample
/// weighs the same, so the estimate tracks the batch least-squares solution.
class RlsEstimator {
public:
    static constexpr double kForgettingFactor = 1.0;

    /// Zero coefficients with covariance `prior_scale * I`.
    RlsEstimator(std::size_t dimension, double prior_scale);
    RlsEstimator(Eigen::VectorXd theta, double prior_scale);

    /// One recursion step. Regressor length must match the dimension.
    void update(std::span<const double> regressor, double observation);

    const Eigen::VectorXd& theta() const { return theta_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    std::size_t dimension() const { return static_cast<std::size_t>(theta_.size()); }
    std::size_t sample_count() const { return sample_count_; }

private:
    Eigen::VectorXd theta_;
    Eigen::MatrixXd covariance_;
    Eigen::VectorXd gain_;
    Eigen::VectorXd px_;
    std::size_t sample_count_ = 0;
};

/// Value-style update, matching the estimator's single-writer use.
RlsEstimator rls_update(RlsEstimator est, std::span<const double> regressor, double observation);

inline constexpr double kDefaultSeedPriorScale = 100.0;
inline constexpr double kDiffusePriorScale = 1.0e6;

/// theta = (alpha, beta), covariance = prior_scale * I.
RlsEstimator seed_rls_from_linear(const LinearModel& model, double prior_scale = kDefaultSeedPriorScale);

/// Smallest root t >= t_now of v(t) = target. Linear models fall back to the
/// linear solution. Throws NoRoot when the speed is never attained.
double time_to_speed(const QuadraticModel& v_model, double target, double t_now);

/// Distance covered between t0 and t1 under `v_model`.
double distance_until(const QuadraticModel& v_model, double t0, double t1);

class MovingAverage {
public:
    explicit MovingAverage(std::size_t window_length);

    void update(double sample);
    double mean() const { return mean_; }
    bool empty() const { return buffer_.empty(); }
    bool full() const { return buffer_.size() == window_length_; }
    std::size_t size() const { return buffer_.size(); }
    std::size_t window_length() const { return window_length_; }
    const std::deque<double>& buffer() const { return buffer_; }

private:
    std::size_t window_length_;
    std::deque<double> buffer_;
    double mean_ = 0.0;
};

MovingAverage ma_update(MovingAverage ma, double sample);

}  // namespace runsafe
