#pragma once

#include "tamatrack/core.hpp"
#include "tamatrack/geometry_params.hpp"

namespace tamatrack {

/// Intersection area over union area, in [0,1].
double iou(const BoundingBox& a, const BoundingBox& b);

/// Advances the track one frame under constant velocity and inflates the
/// covariance by the process noise. dt is always one frame.
Track kalman_predict(const Track& track, const GeometryParams& params);

/// Standard position-measurement update on (cx, cy); the shape is smoothed
/// outside the filter with weight gamma_shape on the detection shape.
Track kalman_update(const Track& track, const Detection& det, const GeometryParams& params);

/// Builds a track state from the first and last supporting boxes: position at
/// the last box, velocity from the endpoint displacement over the frame gap.
Track kalman_init(int id, const BoundingBox& first_box, int first_frame,
                  const BoundingBox& last_box, int last_frame, const GeometryParams& params);

/// exp(-eta * d' Sigma d) where d is the predicted-center-to-detection-center
/// displacement. Equal to 1 exactly at zero displacement.
double motion_likelihood(const Track& track, const Detection& det, const GeometryParams& params);

/// exp(-xi * (|dh|/(ha+hb) + |dw|/(wa+wb))); symmetric in its arguments.
double shape_likelihood(const BoundingBox& a, const BoundingBox& b, const GeometryParams& params);

}  // namespace tamatrack
