#include "ppe/tracker/kalman_filter.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace {

Mat8 transition() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
}

const Mat8& F() {
    static const Mat8 f = transition();
    return f;
}

}  // namespace

Vec4 to_measurement(const BBox& box) {
    return {box.x + box.w / 2.0, box.y + box.h / 2.0, box.h > 0.0 ? box.w / box.h : 0.0, box.h};
}

BBox to_bbox(const Vec8& mean) {
    const double h = mean(3);
    const double w = mean(2) * h;
    return {mean(0) - w / 2.0, mean(1) - h / 2.0, w, h};
}

double squared_mahalanobis(const Vec4& innovation, const Mat4& innovation_cov) {
    const Eigen::LLT<Mat4> llt(innovation_cov);
    if (llt.info() != Eigen::Success) throw SingularInnovation("innovation covariance is not positive definite");
    const Vec4 z = llt.matrixL().solve(innovation);
    return z.squaredNorm();
}

KalmanState KalmanFilter::initiate(const Vec4& m) const {
    KalmanState s;
    s.mean.head<4>() = m;
    s.mean.tail<4>().setZero();
    const double h = m(3);
    const double pw = noise_.position_weight, vw = noise_.velocity_weight;
    Vec8 sd;
    sd << 2 * pw * h, 2 * pw * h, 1e-2, 2 * pw * h, 10 * vw * h, 10 * vw * h, 1e-5, 10 * vw * h;
    s.covariance = sd.array().square().matrix().asDiagonal();
    return s;
}

Mat8 KalmanFilter::process_noise(const Vec8& mean) const {
    const double h = mean(3);
    const double pw = noise_.position_weight, vw = noise_.velocity_weight;
    Vec8 sd;
    sd << pw * h, pw * h, 1e-2, pw * h, vw * h, vw * h, 1e-5, vw * h;
    return (noise_.process_scale * sd.array().square()).matrix().asDiagonal();
}

Mat4 KalmanFilter::measurement_noise(const Vec8& mean) const {
    const double h = mean(3);
    const double pw = noise_.position_weight;
    Vec4 sd;
    sd << pw * h, pw * h, 1e-1, pw * h;
    return (noise_.measurement_scale * sd.array().square()).matrix().asDiagonal();
}

KalmanState KalmanFilter::predict(const KalmanState& state, int steps) const {
    KalmanState s = state;
    for (int i = 0; i < steps; ++i) {
        const Mat8 q = process_noise(s.mean);
        s.mean = F() * s.mean;
        s.covariance = F() * s.covariance * F().transpose() + q;
    }
    s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
    return s;
}

std::pair<Vec4, Mat4> KalmanFilter::project(const KalmanState& state) const {
    Mat4 s = state.covariance.topLeftCorner<4, 4>() + measurement_noise(state.mean);
    return {state.mean.head<4>(), 0.5 * (s + s.transpose())};
}

KalmanState KalmanFilter::update(const KalmanState& state, const Vec4& z) const {
    if (!z.allFinite() || !(z(3) > 0.0)) throw std::invalid_argument("measurement must be finite with h > 0");
    const auto [predicted, s] = project(state);
    const Eigen::LLT<Mat4> llt(s);
    if (llt.info() != Eigen::Success) throw SingularInnovation("innovation covariance is not positive definite");

    // K = P H^T S^-1, with H selecting the first four components
    const Eigen::Matrix<double, 8, 4> pht = state.covariance.leftCols<4>();
    const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();

    KalmanState out;
    out.mean = state.mean + gain * (z - predicted);

    Mat8 i_kh = Mat8::Identity();
    i_kh.leftCols<4>() -= gain;
    const Mat4 r = measurement_noise(state.mean);
    out.covariance = i_kh * state.covariance * i_kh.transpose() + gain * r * gain.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    return out;
}

double KalmanFilter::mahalanobis(const KalmanState& state, const Vec4& measurement) const {
    const auto [predicted, s] = project(state);
    return squared_mahalanobis(measurement - predicted, s);
}

}  // namespace ppe
