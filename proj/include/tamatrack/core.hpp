#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "tamatrack/errors.hpp"
#include "tamatrack/geometry_params.hpp"

namespace tamatrack {

/// Axis-aligned box in pixel coordinates, stored as (left, top, width, height)
/// to match the MOT interchange format. Center form is derived.
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double width = 1.0;
    double height = 1.0;

    BoundingBox() = default;
    BoundingBox(double l, double t, double w, double h) : left(l), top(t), width(w), height(h) {
        if (!(w > 0.0) || !(h > 0.0))
            throw Error("BoundingBox: width and height must be positive");
    }

    double center_x() const { return left + width / 2.0; }
    double center_y() const { return top + height / 2.0; }
    double right() const { return left + width; }
    double bottom() const { return top + height; }
    double area() const { return width * height; }
};

/// RGB raster of a fixed 128x64 shape with channel values in [0,1].
struct Patch {
    static constexpr int kHeight = 128;
    static constexpr int kWidth = 64;
    static constexpr int kChannels = 3;

    std::vector<float> data;  // row-major H x W x C

    Patch() : data(static_cast<std::size_t>(kHeight) * kWidth * kChannels, 0.0f) {}

    float at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * kWidth + x) * kChannels + c];
    }
    float& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * kWidth + x) * kChannels + c];
    }
};

/// Appearance payload of a detection or track template: exactly one of a raw
/// image patch, a precomputed feature vector, or an identity tag (synthetic
/// oracle mode). Instances are immutable and cheap to copy (shared payload).
/// `none()` marks a detection that carries no appearance information, which
/// is still a usable input for payload-agnostic scorers; a default-constructed
/// descriptor is the uninitialized (empty) state.
class AppearanceDescriptor {
public:
    AppearanceDescriptor() = default;

    static AppearanceDescriptor none();
    static AppearanceDescriptor from_patch(Patch p);
    static AppearanceDescriptor from_vector(Eigen::VectorXd v);
    static AppearanceDescriptor from_tag(std::int64_t tag);

    bool empty() const { return data_ == nullptr; }
    bool is_none() const;
    bool has_patch() const;
    bool has_vector() const;
    bool has_tag() const;

    const Patch& patch() const;
    const Eigen::VectorXd& vector() const;
    std::int64_t tag() const;

    /// Feature-space view of the payload: the color histogram of a patch, the
    /// stored vector itself, or a deterministic unit signature derived from
    /// the tag. Computed once per descriptor and cached.
    const Eigen::VectorXd& feature_basis() const;

private:
    struct Data {
        std::variant<std::monostate, Patch, Eigen::VectorXd, std::int64_t> payload;
        mutable std::once_flag basis_once;
        mutable Eigen::VectorXd basis;
    };
    std::shared_ptr<const Data> data_;
};

struct Detection {
    int frame = 1;
    int index = 0;  // 0-based position within its frame in the source ordering
    BoundingBox box;
    double confidence = 1.0;      // clamped to [0,1] on ingest
    double raw_confidence = 1.0;  // pre-clamp detector score, used for NMS ordering
    AppearanceDescriptor descriptor;

    Detection() = default;
    Detection(int frame_, int index_, BoundingBox box_, double raw_conf,
              AppearanceDescriptor desc = {});
};

/// One stored appearance template with the confidence it was matched at, the
/// frame it came from, and the box it was cropped at (the template shape).
struct CueEntry {
    double confidence = 0.0;
    AppearanceDescriptor descriptor;
    int frame = 0;
    BoundingBox box;
};

/// Ordered set of past high-confidence appearance templates, oldest first.
struct HistoricalAppearanceCue {
    std::vector<CueEntry> entries;

    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    const CueEntry& oldest() const { return entries.front(); }
    const CueEntry& newest() const { return entries.back(); }
};

enum class TrackStatus { active, terminated };

struct Track {
    int id = 0;
    Eigen::Vector4d kalman_state = Eigen::Vector4d::Zero();  // cx, cy, vx, vy
    Eigen::Matrix4d kalman_cov = Eigen::Matrix4d::Identity();
    double shape_w = 1.0;  // smoothed width
    double shape_h = 1.0;  // smoothed height
    AppearanceDescriptor recent_appearance;
    BoundingBox recent_box;  // box of the observation recent_appearance came from
    double recent_confidence = 0.0;
    HistoricalAppearanceCue cue;
    int miss_count = 0;
    int birth_frame = 0;
    int last_matched_frame = 0;
    TrackStatus status = TrackStatus::active;

    BoundingBox box() const {
        return BoundingBox(kalman_state(0) - shape_w / 2.0, kalman_state(1) - shape_h / 2.0,
                           shape_w, shape_h);
    }
};

/// Issues track ids that are strictly increasing within a sequence.
class IdSource {
public:
    int next() { return next_id_++; }

private:
    int next_id_ = 1;
};

enum class LikelihoodMode { ctama, deep_tama, baseline_linear, baseline_select, iou_only };
enum class InitMode { hierarchical, iou, distance };

LikelihoodMode parse_likelihood_mode(const std::string& s);
std::string to_string(LikelihoodMode m);
InitMode parse_init_mode(const std::string& s);
std::string to_string(InitMode m);

struct TrackerConfig {
    double beta_age = 2.0;   // cue age bound, in seconds worth of frames
    double beta_intv = 0.2;  // cue addition interval, in seconds worth of frames
    double tau_hist = 0.6;   // cue admission confidence threshold
    double tau_iou = 0.5;    // strict hypothesis extension threshold
    double beta_dist = 0.8;  // weak extension distance bound, in target widths
    double tau_shp = 0.8;    // weak extension height-ratio threshold
    int tau_init = 4;        // tree depth that triggers promotion is tau_init + 1
    double beta_term = 2.0;  // termination bound, in seconds worth of frames
    double tau_match = 0.4;  // gating / match validation threshold
    int tau_cue = 8;         // maximum cue length
    double lambda_c = 3.0;   // recent-confidence damping in the weighted combination
    double lambda_f_histogram = 2.0;  // linear feature update control, histogram scorer
    double lambda_f_embedding = 4.0;  // linear feature update control, embedding scorer
    double tau_a = 0.6;               // selection-update substitution threshold
    int fps = 30;
    LikelihoodMode likelihood_mode = LikelihoodMode::ctama;
    InitMode init_mode = InitMode::hierarchical;
    GeometryParams geometry;
    double oracle_same = 0.9;  // oracle scorer output for equal tags
    double oracle_diff = 0.1;  // oracle scorer output for distinct tags
    double nms_iou = 1.0;      // suppression threshold; > 1 keeps all overlaps
    double nms_conf_min = 0.0; // raw-confidence floor applied before suppression
    int threads = 1;           // similarity-scoring fan-out

    int termination_misses() const;    // round(fps * beta_term)
    int cue_min_interval() const;      // round(fps * beta_intv), half up
    double cue_max_age() const { return fps * beta_age; }
    double lambda_f_for_vectors(bool histogram_like) const {
        return histogram_like ? lambda_f_histogram : lambda_f_embedding;
    }
};

/// Returns the config unchanged when every invariant holds; throws ConfigError
/// with a per-field violation name otherwise.
TrackerConfig validate_config(const TrackerConfig& cfg);

double clamp01(double v);

}  // namespace tamatrack
