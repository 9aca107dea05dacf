#pragma once

#include <vector>

#include "tamatrack/core.hpp"

namespace tamatrack {

struct HypothesisNode {
    Detection det;
    int parent = -1;  // index into the previous level; -1 for the root
};

/// Tentative multi-frame detection structure: one root, one level per frame,
/// every non-root node linked to exactly one parent in the previous level.
/// Node frames strictly increase with level.
struct HypothesisTree {
    std::vector<std::vector<HypothesisNode>> levels;

    int depth() const { return static_cast<int>(levels.size()); }
    const std::vector<HypothesisNode>& deepest() const { return levels.back(); }

    static HypothesisTree seeded(const Detection& det) {
        HypothesisTree t;
        t.levels.push_back({HypothesisNode{det, -1}});
        return t;
    }
};

/// Extends every tree with this frame's unmatched detections: a strict
/// overlap stage first, then a weaker center-distance / height-ratio retry
/// for trees the first stage left childless (stage selection follows
/// cfg.init_mode). Each detection attaches to at most one tree; detections
/// attaching nowhere seed new trees; pre-existing trees that gained no child
/// are dropped.
std::vector<HypothesisTree> extend_trees(std::vector<HypothesisTree> trees,
                                         const std::vector<Detection>& unmatched_dets,
                                         const TrackerConfig& cfg);

struct PromotedTrack {
    Track track;
    std::vector<Detection> path;  // root to leaf, the backdated supporting boxes
};

/// Converts every tree deeper than tau_init into a track built from one
/// leaf-to-root path (maximum summed consecutive overlap; ties broken by
/// higher mean confidence, then lowest node indices). Promoted trees are
/// removed.
std::vector<PromotedTrack> promote_trees(std::vector<HypothesisTree>& trees,
                                         const TrackerConfig& cfg, IdSource& ids);

/// Marks tracks whose miss counter reached round(fps * beta_term) terminated.
std::vector<Track> apply_termination(std::vector<Track> tracks, const TrackerConfig& cfg);

}  // namespace tamatrack
