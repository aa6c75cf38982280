// SPDX-License-Identifier: Apache-2.0

#include "runsafe/estimators.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace runsafe {

LinearModel fit_linear_seed(std::span<const TimedSample> samples) {
    if (samples.size() < 2) {
        throw Error(ErrorCode::DegenerateDesign, "linear seed needs at least two samples");
    }
    const double n = static_cast<double>(samples.size());
    double t_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& s : samples) {
        t_mean += s.t;
        y_mean += s.value;
    }
    t_mean /= n;
    y_mean /= n;
    double stt = 0.0;
    double sty = 0.0;
    for (const auto& s : samples) {
        stt += (s.t - t_mean) * (s.t - t_mean);
        sty += (s.t - t_mean) * (s.value - y_mean);
    }
    if (stt == 0.0) {
        throw Error(ErrorCode::DegenerateDesign, "linear seed samples share one timestamp");
    }
    const double alpha = sty / stt;
    return {alpha, y_mean - alpha * t_mean};
}

RlsEstimator::RlsEstimator(std::size_t dimension, double prior_scale)
    : RlsEstimator(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension)), prior_scale) {}

RlsEstimator::RlsEstimator(Eigen::VectorXd theta, double prior_scale)
    : theta_(std::move(theta)),
      covariance_(prior_scale * Eigen::MatrixXd::Identity(theta_.size(), theta_.size())),
      gain_(theta_.size()),
      px_(theta_.size()) {}

void RlsEstimator::update(std::span<const double> regressor, double observation) {
    if (regressor.size() != dimension()) {
        throw std::invalid_argument("regressor dimension " + std::to_string(regressor.size()) +
                                    " does not match estimator dimension " + std::to_string(dimension()));
    }
    const Eigen::Map<const Eigen::VectorXd> x(regressor.data(), static_cast<Eigen::Index>(regressor.size()));
    px_.noalias() = covariance_ * x;
    const double denom = kForgettingFactor + x.dot(px_);
    gain_ = px_ / denom;
    const double innovation = observation - x.dot(theta_);
    theta_ += gain_ * innovation;
    covariance_.noalias() -= gain_ * px_.transpose();
    covariance_ /= kForgettingFactor;
    covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();
    ++sample_count_;
}

RlsEstimator rls_update(RlsEstimator est, std::span<const double> regressor, double observation) {
    est.update(regressor, observation);
    return est;
}

RlsEstimator seed_rls_from_linear(const LinearModel& model, double prior_scale) {
    Eigen::VectorXd theta(2);
    theta << model.alpha, model.beta;
    return RlsEstimator(std::move(theta), prior_scale);
}

double time_to_speed(const QuadraticModel& m, double target, double t_now) {
    // 0.5 alpha t^2 + beta t + (gamma - target) = 0
    const double a = 0.5 * m.alpha;
    const double b = m.beta;
    const double c = m.gamma - target;
    // Already at the target speed right now.
    if (std::abs(m(t_now) - target) <= 1e-12 * std::max(1.0, std::abs(target))) {
        return t_now;
    }
    if (a == 0.0) {
        if (b == 0.0) {
            throw Error(ErrorCode::NoRoot, "constant speed model never reaches target");
        }
        const double t = -c / b;
        if (t >= t_now) return t;
        throw Error(ErrorCode::NoRoot, "linear speed model reached target in the past");
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        throw Error(ErrorCode::NoRoot, "speed model never reaches target");
    }
    // Numerically stable pair of roots.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 >= t_now) return r1;
    if (r2 >= t_now) return r2;
    throw Error(ErrorCode::NoRoot, "speed model reached target only in the past");
}

double distance_until(const QuadraticModel& m, double t0, double t1) {
    return m.integral(t1) - m.integral(t0);
}

MovingAverage::MovingAverage(std::size_t window_length) : window_length_(window_length) {
    if (window_length == 0) {
        throw std::invalid_argument("moving average window must be >= 1");
    }
}

void MovingAverage::update(double sample) {
    buffer_.push_back(sample);
    if (buffer_.size() > window_length_) {
        buffer_.pop_front();
    }
    // Recomputed from the buffer so no running-sum drift accumulates.
    mean_ = std::accumulate(buffer_.begin(), buffer_.end(), 0.0) / static_cast<double>(buffer_.size());
}

MovingAverage ma_update(MovingAverage ma, double sample) {
    ma.update(sample);
    return ma;
}

}  // namespace runsafe
