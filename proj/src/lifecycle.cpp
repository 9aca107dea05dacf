#include "tamatrack/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tamatrack/geometry.hpp"

namespace tamatrack {

namespace {

double center_distance(const BoundingBox& a, const BoundingBox& b) {
    const double dx = a.center_x() - b.center_x();
    const double dy = a.center_y() - b.center_y();
    return std::sqrt(dx * dx + dy * dy);
}

double height_ratio(const BoundingBox& a, const BoundingBox& b) {
    return std::min(a.height / b.height, b.height / a.height);
}

// Best strict-overlap link of a detection against a tree's deepest nodes.
double best_iou(const HypothesisTree& tree, const Detection& det) {
    double best = 0.0;
    for (const HypothesisNode& n : tree.deepest()) best = std::max(best, iou(n.det.box, det.box));
    return best;
}

// Smallest qualifying center distance under the weak test, or +inf.
double best_weak_distance(const HypothesisTree& tree, const Detection& det,
                          const TrackerConfig& cfg) {
    double best = std::numeric_limits<double>::infinity();
    for (const HypothesisNode& n : tree.deepest()) {
        const double d = center_distance(n.det.box, det.box);
        if (d < cfg.beta_dist * det.box.width && height_ratio(det.box, n.det.box) > cfg.tau_shp)
            best = std::min(best, d);
    }
    return best;
}

// Parent of a newly attached detection: the deepest node it overlaps most
// (weak stage: the nearest deepest node).
int pick_parent_iou(const HypothesisTree& tree, const Detection& det) {
    int parent = 0;
    double best = -1.0;
    for (int n = 0; n < static_cast<int>(tree.deepest().size()); ++n) {
        const double v = iou(tree.deepest()[n].det.box, det.box);
        if (v > best) {
            best = v;
            parent = n;
        }
    }
    return parent;
}

int pick_parent_distance(const HypothesisTree& tree, const Detection& det) {
    int parent = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n < static_cast<int>(tree.deepest().size()); ++n) {
        const double v = center_distance(tree.deepest()[n].det.box, det.box);
        if (v < best) {
            best = v;
            parent = n;
        }
    }
    return parent;
}

}  // namespace

std::vector<HypothesisTree> extend_trees(std::vector<HypothesisTree> trees,
                                         const std::vector<Detection>& unmatched_dets,
                                         const TrackerConfig& cfg) {
    const int n_trees = static_cast<int>(trees.size());
    const int n_dets = static_cast<int>(unmatched_dets.size());
    std::vector<int> det_tree(n_dets, -1);          // chosen tree per detection
    std::vector<char> det_via_weak(n_dets, 0);
    std::vector<std::vector<int>> children(n_trees);  // detection indices per tree

    const bool use_iou_stage = cfg.init_mode != InitMode::distance;
    const bool use_weak_stage = cfg.init_mode != InitMode::iou;

    if (use_iou_stage) {
        struct Link {
            double iou_value;
            int det;
            int tree;
        };
        std::vector<Link> links;
        for (int j = 0; j < n_dets; ++j)
            for (int i = 0; i < n_trees; ++i) {
                const double v = best_iou(trees[i], unmatched_dets[j]);
                if (v > cfg.tau_iou) links.push_back(Link{v, j, i});
            }
        std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
            if (a.iou_value != b.iou_value) return a.iou_value > b.iou_value;
            if (a.det != b.det) return a.det < b.det;
            return a.tree < b.tree;
        });
        for (const Link& l : links) {
            if (det_tree[l.det] != -1) continue;
            det_tree[l.det] = l.tree;
            children[l.tree].push_back(l.det);
        }
    }

    if (use_weak_stage) {
        // only trees the strict stage left childless take the weak retry
        std::vector<char> retries(n_trees, 0);
        for (int i = 0; i < n_trees; ++i) retries[i] = children[i].empty();
        struct Link {
            double distance;
            int det;
            int tree;
        };
        std::vector<Link> links;
        for (int j = 0; j < n_dets; ++j) {
            if (det_tree[j] != -1) continue;
            for (int i = 0; i < n_trees; ++i) {
                if (!retries[i]) continue;
                const double d = best_weak_distance(trees[i], unmatched_dets[j], cfg);
                if (std::isfinite(d)) links.push_back(Link{d, j, i});
            }
        }
        std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
            if (a.distance != b.distance) return a.distance < b.distance;
            if (a.det != b.det) return a.det < b.det;
            return a.tree < b.tree;
        });
        for (const Link& l : links) {
            if (det_tree[l.det] != -1) continue;
            det_tree[l.det] = l.tree;
            det_via_weak[l.det] = 1;
            children[l.tree].push_back(l.det);
        }
    }

    std::vector<HypothesisTree> out;
    out.reserve(trees.size() + unmatched_dets.size());
    for (int i = 0; i < n_trees; ++i) {
        if (children[i].empty()) continue;  // false-positive hypothesis, dropped
        HypothesisTree t = std::move(trees[i]);
        std::vector<HypothesisNode> level;
        for (int j : children[i]) {
            const int parent = det_via_weak[j] ? pick_parent_distance(t, unmatched_dets[j])
                                               : pick_parent_iou(t, unmatched_dets[j]);
            level.push_back(HypothesisNode{unmatched_dets[j], parent});
        }
        t.levels.push_back(std::move(level));
        out.push_back(std::move(t));
    }
    for (int j = 0; j < n_dets; ++j)
        if (det_tree[j] == -1) out.push_back(HypothesisTree::seeded(unmatched_dets[j]));
    return out;
}

namespace {

struct PathCandidate {
    std::vector<int> node_indices;  // root to leaf, one per level
    double iou_sum = 0.0;
    double mean_conf = 0.0;
};

std::vector<Detection> path_detections(const HypothesisTree& tree, const PathCandidate& path) {
    std::vector<Detection> dets;
    dets.reserve(path.node_indices.size());
    for (int level = 0; level < static_cast<int>(path.node_indices.size()); ++level)
        dets.push_back(tree.levels[level][path.node_indices[level]].det);
    return dets;
}

PathCandidate best_path(const HypothesisTree& tree) {
    const int depth = tree.depth();
    std::vector<PathCandidate> candidates;
    for (int leaf = 0; leaf < static_cast<int>(tree.deepest().size()); ++leaf) {
        PathCandidate c;
        c.node_indices.assign(depth, 0);
        int idx = leaf;
        for (int level = depth - 1; level >= 0; --level) {
            c.node_indices[level] = idx;
            idx = tree.levels[level][idx].parent;
        }
        double conf_sum = 0.0;
        for (int level = 0; level < depth; ++level) {
            const Detection& d = tree.levels[level][c.node_indices[level]].det;
            conf_sum += d.confidence;
            if (level > 0)
                c.iou_sum +=
                    iou(tree.levels[level - 1][c.node_indices[level - 1]].det.box, d.box);
        }
        c.mean_conf = conf_sum / depth;
        candidates.push_back(std::move(c));
    }
    return *std::min_element(candidates.begin(), candidates.end(),
                             [](const PathCandidate& a, const PathCandidate& b) {
                                 if (a.iou_sum != b.iou_sum) return a.iou_sum > b.iou_sum;
                                 if (a.mean_conf != b.mean_conf) return a.mean_conf > b.mean_conf;
                                 return a.node_indices < b.node_indices;
                             });
}

}  // namespace

std::vector<PromotedTrack> promote_trees(std::vector<HypothesisTree>& trees,
                                         const TrackerConfig& cfg, IdSource& ids) {
    std::vector<PromotedTrack> promoted;
    std::vector<HypothesisTree> kept;
    kept.reserve(trees.size());
    for (HypothesisTree& tree : trees) {
        if (tree.depth() <= cfg.tau_init) {
            kept.push_back(std::move(tree));
            continue;
        }
        const PathCandidate path = best_path(tree);
        std::vector<Detection> dets = path_detections(tree, path);

        const Detection& first = dets.front();
        const Detection& last = dets.back();
        Track t = kalman_init(ids.next(), first.box, first.frame, last.box, last.frame,
                              cfg.geometry);
        t.recent_appearance = last.descriptor;
        t.recent_box = last.box;
        t.recent_confidence = 0.5;  // neutral until the first real match
        promoted.push_back(PromotedTrack{std::move(t), std::move(dets)});
    }
    trees = std::move(kept);
    return promoted;
}

std::vector<Track> apply_termination(std::vector<Track> tracks, const TrackerConfig& cfg) {
    const int limit = cfg.termination_misses();
    for (Track& t : tracks)
        if (t.status == TrackStatus::active && t.miss_count >= limit)
            t.status = TrackStatus::terminated;
    return tracks;
}

}  // namespace tamatrack
