#include "tamatrack/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace tamatrack {

namespace {

Eigen::Matrix4d transition_matrix() {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = 1.0;
    f(1, 3) = 1.0;
    return f;
}

Eigen::Matrix4d process_noise(const KalmanParams& k) {
    Eigen::Vector4d q(k.q_pos, k.q_pos, k.q_vel, k.q_vel);
    return q.asDiagonal();
}

void symmetrize(Eigen::Matrix4d& p) { p = ((p + p.transpose()) / 2.0).eval(); }

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.left, b.left));
    const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

Track kalman_predict(const Track& track, const GeometryParams& params) {
    Track out = track;
    const Eigen::Matrix4d f = transition_matrix();
    out.kalman_state = f * track.kalman_state;
    out.kalman_cov = f * track.kalman_cov * f.transpose() + process_noise(params.kalman);
    symmetrize(out.kalman_cov);
    return out;
}

Track kalman_update(const Track& track, const Detection& det, const GeometryParams& params) {
    Track out = track;
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    const Eigen::Matrix2d r = Eigen::Vector2d(params.kalman.r_meas, params.kalman.r_meas).asDiagonal();

    const Eigen::Vector2d z(det.box.center_x(), det.box.center_y());
    const Eigen::Vector2d innovation = z - h * track.kalman_state;
    const Eigen::Matrix2d s = h * track.kalman_cov * h.transpose() + r;
    const Eigen::Matrix<double, 4, 2> gain = track.kalman_cov * h.transpose() * s.inverse();

    out.kalman_state = track.kalman_state + gain * innovation;
    out.kalman_cov = (Eigen::Matrix4d::Identity() - gain * h) * track.kalman_cov;
    symmetrize(out.kalman_cov);

    const double g = params.gamma_shape;
    out.shape_w = g * det.box.width + (1.0 - g) * track.shape_w;
    out.shape_h = g * det.box.height + (1.0 - g) * track.shape_h;
    return out;
}

Track kalman_init(int id, const BoundingBox& first_box, int first_frame,
                  const BoundingBox& last_box, int last_frame, const GeometryParams& params) {
    Track t;
    t.id = id;
    const double dt = static_cast<double>(last_frame - first_frame);
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    if (dt > 0.0) {
        v(0) = (last_box.center_x() - first_box.center_x()) / dt;
        v(1) = (last_box.center_y() - first_box.center_y()) / dt;
    }
    t.kalman_state << last_box.center_x(), last_box.center_y(), v(0), v(1);
    t.kalman_cov = Eigen::Vector4d(params.kalman.p0_pos, params.kalman.p0_pos,
                                   params.kalman.p0_vel, params.kalman.p0_vel)
                       .asDiagonal();
    t.shape_w = last_box.width;
    t.shape_h = last_box.height;
    t.birth_frame = first_frame;
    t.last_matched_frame = last_frame;
    return t;
}

double motion_likelihood(const Track& track, const Detection& det, const GeometryParams& params) {
    Eigen::Vector2d d(track.kalman_state(0) - det.box.center_x(),
                      track.kalman_state(1) - det.box.center_y());
    return std::exp(-params.eta * double(d.transpose() * params.sigma * d));
}

double shape_likelihood(const BoundingBox& a, const BoundingBox& b, const GeometryParams& params) {
    const double dh = std::abs(a.height - b.height);
    const double dw = std::abs(a.width - b.width);
    const double sh = a.height + b.height;
    const double sw = a.width + b.width;
    return std::exp(-params.xi * (dh / sh + dw / sw));
}

}  // namespace tamatrack
