#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tamatrack/core.hpp"
#include "tamatrack/engine.hpp"
#include "tamatrack/eval.hpp"

namespace tamatrack {

/// One comma-separated interchange row: frame, id, bb_left, bb_top, bb_width,
/// bb_height, conf, x, y, z. Detections carry id -1; unused trailing fields
/// are -1.
struct MotRow {
    int frame = 1;
    int id = -1;
    double bb_left = 0.0;
    double bb_top = 0.0;
    double bb_width = 1.0;
    double bb_height = 1.0;
    double conf = 1.0;
    double x = -1.0;
    double y = -1.0;
    double z = -1.0;
};

std::vector<MotRow> parse_mot_rows(const std::string& path);
void write_mot_rows(const std::vector<MotRow>& rows, const std::string& path);
std::string mot_row_line(const MotRow& r);  // one serialized row, no newline

/// Groups rows by frame; the in-file order within a frame fixes each
/// detection's index. Descriptors start empty of appearance payload.
std::map<int, std::vector<Detection>> parse_detections(const std::string& path);

std::vector<ResultRow> to_results(const std::vector<MotRow>& rows);
GroundTruth to_ground_truth(const std::vector<MotRow>& rows);

/// Writes result rows in (frame, id) order with conf 1 and -1 trailing
/// fields; byte-stable across runs.
void write_results(const std::vector<ResultRow>& rows, const std::string& path);

std::vector<ResultRow> parse_results(const std::string& path);
GroundTruth parse_ground_truth(const std::string& path);
void write_ground_truth(const GroundTruth& gt, const std::string& path);
void write_detections(const std::map<int, std::vector<Detection>>& dets, const std::string& path);

/// Exact-key (frame, det index) -> feature vector lookup with one dimension
/// shared by every row.
struct FeatureLookup {
    int dim = 0;
    std::map<std::pair<int, int>, Eigen::VectorXd> values;
};

/// Lines of `frame,det_index,dim,v1,...,v_dim`. Duplicate keys and mixed
/// dimensions are rejected with their line numbers.
FeatureLookup parse_feature_file(const std::string& path);
void write_feature_file(const FeatureLookup& lookup, const std::string& path);

/// Replaces every detection's descriptor from the lookup; every detection
/// must have a feature row. With as_tags set, rows must be one-dimensional
/// and are interpreted as identity tags.
void attach_features(std::map<int, std::vector<Detection>>& dets, const FeatureLookup& lookup,
                     bool as_tags);

/// Loads `<frame>_<index>.ppm` patches from a directory for every detection.
void attach_patches(std::map<int, std::vector<Detection>>& dets, const std::string& dir);

/// Binary P6 image, maxval up to 255, bilinearly resized to the fixed patch
/// shape with values scaled to [0,1].
Patch read_ppm(const std::string& path);
void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb);

/// Line-based `key = value` configuration mirroring the TrackerConfig field
/// names; '#' starts a comment. Unknown keys are rejected by name.
TrackerConfig load_config(const std::string& path, TrackerConfig base = {});

ScenarioSpec parse_scenario_spec(const std::string& path);

}  // namespace tamatrack
