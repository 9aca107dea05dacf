#pragma once

#include <map>
#include <vector>

#include "tamatrack/assoc.hpp"
#include "tamatrack/core.hpp"
#include "tamatrack/lifecycle.hpp"

namespace tamatrack {

struct ResultRow {
    int frame = 0;
    int id = 0;
    BoundingBox box;

    friend bool operator==(const ResultRow& a, const ResultRow& b) {
        return a.frame == b.frame && a.id == b.id && a.box.left == b.box.left &&
               a.box.top == b.box.top && a.box.width == b.box.width &&
               a.box.height == b.box.height;
    }
};

struct FrameEvents {
    std::vector<std::pair<int, int>> matches;  // (track id, detection index in this frame)
    std::vector<int> births;                   // promoted track ids (rows are backdated)
    std::vector<int> terminations;
};

/// Owns all per-sequence tracking state and runs one frame at a time:
/// predict, score, assign, validate, update, terminate, initialize.
/// Not reentrant; one engine per sequence.
class Engine {
public:
    Engine(TrackerConfig cfg, AppearanceModel model);

    /// Processes one frame worth of detections (possibly none). Every
    /// detection must carry the given frame index, and frames must strictly
    /// increase across calls. The frame gap is irrelevant: each call advances
    /// the motion model by exactly one step.
    FrameEvents step(int frame, const std::vector<Detection>& dets);

    const std::vector<Track>& active_tracks() const { return tracks_; }
    const std::vector<HypothesisTree>& trees() const { return trees_; }
    int current_frame() const { return current_frame_; }

    /// All rows emitted so far, sorted by (frame, id); backdated birth rows
    /// land at their original frames.
    std::vector<ResultRow> sorted_results() const;

private:
    TrackerConfig cfg_;
    AppearanceModel model_;
    std::vector<Track> tracks_;
    std::vector<HypothesisTree> trees_;
    IdSource ids_;
    int current_frame_ = 0;
    std::vector<ResultRow> rows_;
};

/// Folds step over the given frames (detections default to none for frames
/// absent from the map) and returns the rows sorted by (frame, id).
std::vector<ResultRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                    const std::vector<int>& frames, const TrackerConfig& cfg,
                                    const AppearanceModel& model);

/// Convenience overload covering every integer frame from 1 to the last frame
/// present in the map.
std::vector<ResultRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                    const TrackerConfig& cfg, const AppearanceModel& model);

}  // namespace tamatrack
