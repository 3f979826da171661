#pragma once

#include <utility>

#include <Eigen/Core>

#include "ppe/core/types.hpp"

namespace ppe {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// Constant-velocity state (u, v, aspect, h, du, dv, daspect, dh) with
/// (u, v) the box centre, aspect = w / h and velocities in pixels per frame.
struct KalmanState {
    Vec8 mean = Vec8::Zero();
    Mat8 covariance = Mat8::Identity();
};

/// Noise is scale-adaptive: standard deviations of position and velocity
/// terms are the weights below times the box height.
struct KalmanNoise {
    double position_weight = 1.0 / 20.0;
    double velocity_weight = 1.0 / 160.0;
    double process_scale = 1.0;      ///< multiplies the process covariance Q
    double measurement_scale = 1.0;  ///< multiplies the measurement covariance R
};

/// Box -> (u, v, aspect, h).
Vec4 to_measurement(const BBox& box);
/// Observed part of a state mean -> box.
BBox to_bbox(const Vec8& mean);

/// Squared Mahalanobis distance innovation^T S^-1 innovation. Throws SingularInnovation.
double squared_mahalanobis(const Vec4& innovation, const Mat4& innovation_cov);

/// Chi-square 0.95 quantile with 4 degrees of freedom, the usual gate.
inline constexpr double kChi2Gate95 = 9.4877;

class KalmanFilter {
public:
    explicit KalmanFilter(KalmanNoise noise = {}) : noise_(noise) {}

    KalmanState initiate(const Vec4& measurement) const;

    /// Advances `steps` frames: mean <- F mean, P <- F P F^T + Q per step.
    KalmanState predict(const KalmanState& state, int steps = 1) const;

    /// Predicted observation and innovation covariance H P H^T + R.
    std::pair<Vec4, Mat4> project(const KalmanState& state) const;

    /// Kalman correction with a Joseph-form covariance update.
    /// Throws SingularInnovation when H P H^T + R is not positive definite.
    KalmanState update(const KalmanState& state, const Vec4& measurement) const;

    double mahalanobis(const KalmanState& state, const Vec4& measurement) const;

    const KalmanNoise& noise() const noexcept { return noise_; }

private:
    Mat8 process_noise(const Vec8& mean) const;
    Mat4 measurement_noise(const Vec8& mean) const;

    KalmanNoise noise_;
};

}  // namespace ppe
