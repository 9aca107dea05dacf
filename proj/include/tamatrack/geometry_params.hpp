#pragma once

#include <Eigen/Dense>

namespace tamatrack {

struct KalmanParams {
    double q_pos = 1.0;    // process noise, position
    double q_vel = 0.5;    // process noise, velocity
    double r_meas = 10.0;  // measurement noise
    double p0_pos = 10.0;  // initial position variance
    double p0_vel = 100.0; // initial velocity variance
};

/// Parameters of the geometric likelihood model and the Kalman filter.
/// `sigma` plays the role of a fixed inverse-covariance weighting of the
/// center displacement; it must be symmetric positive definite.
struct GeometryParams {
    double eta = 0.5;  // motion sharpness
    double xi = 4.0;   // shape sharpness
    Eigen::Matrix2d sigma = (Eigen::Matrix2d() << 1.0 / (70.0 * 70.0), 0.0,
                             0.0, 1.0 / (70.0 * 70.0))
                                .finished();
    KalmanParams kalman;
    double gamma_shape = 0.5;  // smoothing weight for detection shape, in (0,1]
};

}  // namespace tamatrack
