#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tamatrack/core.hpp"
#include "tamatrack/engine.hpp"

namespace tamatrack {

struct GtRow {
    int frame = 0;
    int identity = 0;
    BoundingBox box;
};

/// At most one row per (frame, identity).
struct GroundTruth {
    std::vector<GtRow> rows;
};

struct ClearMotResult {
    int fp = 0;
    int fn = 0;
    int idsw = 0;
    int fm = 0;  // match interruptions, reported but not gated
    int gt_count = 0;
    int tp = 0;
    double mota = 0.0;
    double motp = 0.0;  // mean matched IoU in [0,1]
    int mt = 0;
    int ml = 0;
};

/// Per-frame correspondence that keeps the previous identity-to-id match
/// while the overlap stays above the threshold, assigning the remainder with
/// a maximum-overlap one-to-one matching.
ClearMotResult clear_mot(const GroundTruth& gt, const std::vector<ResultRow>& results,
                         double iou_threshold = 0.5);

/// Trajectory-level identity F1: optimal bipartite matching of gt identities
/// to tracker ids on per-frame overlap counts.
double idf1(const GroundTruth& gt, const std::vector<ResultRow>& results,
            double iou_threshold = 0.5);

/// Drops detections with raw confidence below conf_min, then greedily keeps
/// the highest-raw-confidence box and suppresses overlaps above iou_thresh.
/// Survivors keep their original relative order.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_thresh, double conf_min);

/// Frame-keeping stride for a fixed-rate reduction; throws NonIntegerStride
/// when fps_orig is not a multiple of fps_new.
int decimation_stride(int fps_orig, int fps_new);

/// Keeps frame stamps t with (t - 1) % (fps_orig / fps_new) == 0.
std::vector<int> decimate(const std::vector<int>& frames, int fps_orig, int fps_new);

struct Waypoint {
    int frame = 1;
    double cx = 0.0;
    double cy = 0.0;
};

struct TargetSpec {
    std::vector<Waypoint> waypoints;  // sorted by frame; the target exists on their span
    double width = 30.0;
    double height = 60.0;
};

struct OcclusionWindow {
    int target = 0;  // index into ScenarioSpec::targets
    int frame_begin = 0;
    int frame_end = 0;  // inclusive
};

/// Deterministic synthetic scene description. Occluded frames emit neither a
/// detection nor a ground-truth row (the target is invisible); detector
/// dropout keeps the ground-truth row. Clutter arrives in bursts around a
/// fixed zone, the way detectors repeat a false box on background structure;
/// every clutter detection carries a fresh identity.
struct ScenarioSpec {
    double arena_w = 640.0;
    double arena_h = 480.0;
    int n_frames = 100;
    int fps = 10;
    std::vector<TargetSpec> targets;
    double pos_noise = 0.0;
    double size_noise = 0.0;
    double dropout = 0.0;
    std::vector<OcclusionWindow> occlusions;
    double descriptor_noise = 0.0;
    double clutter_rate = 0.0;  // expected clutter detections per frame
    int clutter_burst = 1;      // consecutive frames a clutter source persists
    double clutter_cx = 320.0;
    double clutter_cy = 240.0;
    double clutter_spread = 12.0;
    double clutter_width = 30.0;
    double clutter_height = 60.0;
    std::uint64_t seed = 1;
};

struct Scenario {
    std::map<int, std::vector<Detection>> detections;  // vector descriptors
    GroundTruth gt;
    std::map<std::pair<int, int>, std::int64_t> tags;  // (frame, det index) -> identity
};

Scenario generate_scenario(const ScenarioSpec& spec);

/// Same detections with identity-tag descriptors for oracle-mode runs.
std::map<int, std::vector<Detection>> with_tag_descriptors(const Scenario& s);

/// The canonical two-target crossing scene: equal-speed approach, meeting at
/// the arena center under an eight-frame mutual occlusion, then a slow
/// separation that defeats straight-line extrapolation.
ScenarioSpec crossing_scenario_spec(std::uint64_t seed = 7);

}  // namespace tamatrack
