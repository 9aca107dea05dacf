#include "tamatrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "tamatrack/appearance.hpp"
#include "tamatrack/assoc.hpp"
#include "tamatrack/geometry.hpp"

namespace tamatrack {

ClearMotResult clear_mot(const GroundTruth& gt, const std::vector<ResultRow>& results,
                         double iou_threshold) {
    ClearMotResult out;
    out.gt_count = static_cast<int>(gt.rows.size());

    std::map<int, std::vector<GtRow>> gt_by_frame;
    for (const GtRow& r : gt.rows) gt_by_frame[r.frame].push_back(r);
    std::map<int, std::vector<ResultRow>> res_by_frame;
    for (const ResultRow& r : results) res_by_frame[r.frame].push_back(r);

    std::set<int> frames;
    for (const auto& [f, _] : gt_by_frame) frames.insert(f);
    for (const auto& [f, _] : res_by_frame) frames.insert(f);

    std::unordered_map<int, int> prev_match;  // gt identity -> tracker id
    struct Coverage {
        int present = 0;
        int matched = 0;
        bool in_gap = false;     // had a match, currently unmatched
        bool matched_ever = false;
    };
    std::unordered_map<int, Coverage> coverage;

    double iou_sum = 0.0;
    static const std::vector<GtRow> kNoGt;
    static const std::vector<ResultRow> kNoRes;

    for (int frame : frames) {
        const auto git = gt_by_frame.find(frame);
        const auto rit = res_by_frame.find(frame);
        const std::vector<GtRow>& g = git == gt_by_frame.end() ? kNoGt : git->second;
        const std::vector<ResultRow>& r = rit == res_by_frame.end() ? kNoRes : rit->second;

        std::vector<int> g_match(g.size(), -1);  // index into r
        std::vector<char> r_used(r.size(), 0);

        // carry over the previous correspondence while it still overlaps
        for (std::size_t a = 0; a < g.size(); ++a) {
            const auto pit = prev_match.find(g[a].identity);
            if (pit == prev_match.end()) continue;
            for (std::size_t b = 0; b < r.size(); ++b) {
                if (r_used[b] || r[b].id != pit->second) continue;
                if (iou(g[a].box, r[b].box) >= iou_threshold) {
                    g_match[a] = static_cast<int>(b);
                    r_used[b] = 1;
                }
                break;
            }
        }

        // maximum-overlap assignment on the remainder
        std::vector<int> g_rest, r_rest;
        for (std::size_t a = 0; a < g.size(); ++a)
            if (g_match[a] == -1) g_rest.push_back(static_cast<int>(a));
        for (std::size_t b = 0; b < r.size(); ++b)
            if (!r_used[b]) r_rest.push_back(static_cast<int>(b));
        if (!g_rest.empty() && !r_rest.empty()) {
            Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(g_rest.size(), r_rest.size());
            for (std::size_t a = 0; a < g_rest.size(); ++a)
                for (std::size_t b = 0; b < r_rest.size(); ++b) {
                    const double v = iou(g[g_rest[a]].box, r[r_rest[b]].box);
                    if (v >= iou_threshold) cost(a, b) = -v;
                }
            for (const auto& [a, b] : hungarian(cost).pairs) {
                if (cost(a, b) == 0.0) continue;  // below threshold
                g_match[g_rest[a]] = r_rest[b];
                r_used[r_rest[b]] = 1;
            }
        }

        for (std::size_t a = 0; a < g.size(); ++a) {
            Coverage& cov = coverage[g[a].identity];
            ++cov.present;
            if (g_match[a] == -1) {
                ++out.fn;
                if (cov.matched_ever) cov.in_gap = true;
                continue;
            }
            const ResultRow& m = r[g_match[a]];
            ++out.tp;
            ++cov.matched;
            iou_sum += iou(g[a].box, m.box);
            const auto pit = prev_match.find(g[a].identity);
            if (pit != prev_match.end() && pit->second != m.id) ++out.idsw;
            if (cov.in_gap) ++out.fm;
            cov.in_gap = false;
            cov.matched_ever = true;
            prev_match[g[a].identity] = m.id;
        }
        for (std::size_t b = 0; b < r.size(); ++b)
            if (!r_used[b]) ++out.fp;
    }

    out.motp = out.tp > 0 ? iou_sum / out.tp : 0.0;
    out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) /
                         std::max(1, out.gt_count);
    for (const auto& [identity, cov] : coverage) {
        const double ratio = static_cast<double>(cov.matched) / cov.present;
        if (ratio >= 0.8) ++out.mt;
        if (ratio <= 0.2) ++out.ml;
    }
    return out;
}

double idf1(const GroundTruth& gt, const std::vector<ResultRow>& results, double iou_threshold) {
    std::map<int, std::vector<GtRow>> gt_by_frame;
    for (const GtRow& r : gt.rows) gt_by_frame[r.frame].push_back(r);
    std::map<int, std::vector<ResultRow>> res_by_frame;
    for (const ResultRow& r : results) res_by_frame[r.frame].push_back(r);

    // overlap counts per (gt identity, tracker id), one per frame at most
    std::map<std::pair<int, int>, int> overlap;
    std::vector<int> gt_ids, tr_ids;
    for (const auto& [frame, g] : gt_by_frame) {
        const auto rit = res_by_frame.find(frame);
        if (rit == res_by_frame.end()) continue;
        std::set<std::pair<int, int>> seen;
        for (const GtRow& a : g)
            for (const ResultRow& b : rit->second)
                if (iou(a.box, b.box) >= iou_threshold) seen.insert({a.identity, b.id});
        for (const auto& key : seen) ++overlap[key];
    }
    {
        std::set<int> gs, ts;
        for (const GtRow& r : gt.rows) gs.insert(r.identity);
        for (const ResultRow& r : results) ts.insert(r.id);
        gt_ids.assign(gs.begin(), gs.end());
        tr_ids.assign(ts.begin(), ts.end());
    }

    long long idtp = 0;
    if (!gt_ids.empty() && !tr_ids.empty()) {
        Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(gt_ids.size(), tr_ids.size());
        for (std::size_t a = 0; a < gt_ids.size(); ++a)
            for (std::size_t b = 0; b < tr_ids.size(); ++b) {
                const auto it = overlap.find({gt_ids[a], tr_ids[b]});
                if (it != overlap.end()) cost(a, b) = -static_cast<double>(it->second);
            }
        for (const auto& [a, b] : hungarian(cost).pairs) idtp += -static_cast<long long>(cost(a, b));
    }
    const long long idfp = static_cast<long long>(results.size()) - idtp;
    const long long idfn = static_cast<long long>(gt.rows.size()) - idtp;
    const long long denom = 2 * idtp + idfp + idfn;
    if (denom == 0) return 1.0;  // nothing to track, nothing tracked
    return static_cast<double>(2 * idtp) / static_cast<double>(denom);
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_thresh, double conf_min) {
    std::vector<int> order(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return dets[a].raw_confidence > dets[b].raw_confidence;
    });
    std::vector<char> kept(dets.size(), 0), removed(dets.size(), 0);
    for (int idx : order) {
        if (removed[idx] || dets[idx].raw_confidence < conf_min) continue;
        kept[idx] = 1;
        for (std::size_t j = 0; j < dets.size(); ++j) {
            if (kept[j] || removed[j]) continue;
            if (iou(dets[idx].box, dets[j].box) > iou_thresh) removed[j] = 1;
        }
    }
    std::vector<Detection> out;
    out.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (kept[i]) out.push_back(std::move(dets[i]));
    return out;
}

int decimation_stride(int fps_orig, int fps_new) {
    if (fps_orig < 1 || fps_new < 1)
        throw NonIntegerStride("frame rates must be positive");
    if (fps_orig % fps_new != 0)
        throw NonIntegerStride(std::to_string(fps_orig) + " is not a multiple of " +
                               std::to_string(fps_new));
    return fps_orig / fps_new;
}

std::vector<int> decimate(const std::vector<int>& frames, int fps_orig, int fps_new) {
    const int stride = decimation_stride(fps_orig, fps_new);
    std::vector<int> kept;
    for (int t : frames)
        if ((t - 1) % stride == 0) kept.push_back(t);
    return kept;
}

namespace {

bool target_alive(const TargetSpec& t, int frame) {
    return !t.waypoints.empty() && frame >= t.waypoints.front().frame &&
           frame <= t.waypoints.back().frame;
}

std::pair<double, double> interpolate(const TargetSpec& t, int frame) {
    const auto& wp = t.waypoints;
    if (frame <= wp.front().frame) return {wp.front().cx, wp.front().cy};
    for (std::size_t k = 1; k < wp.size(); ++k) {
        if (frame <= wp[k].frame) {
            const double span = wp[k].frame - wp[k - 1].frame;
            const double a = span > 0 ? (frame - wp[k - 1].frame) / span : 1.0;
            return {wp[k - 1].cx + a * (wp[k].cx - wp[k - 1].cx),
                    wp[k - 1].cy + a * (wp[k].cy - wp[k - 1].cy)};
        }
    }
    return {wp.back().cx, wp.back().cy};
}

bool occluded(const ScenarioSpec& spec, int target, int frame) {
    for (const OcclusionWindow& w : spec.occlusions)
        if (w.target == target && frame >= w.frame_begin && frame <= w.frame_end) return true;
    return false;
}

BoundingBox centered_box(double cx, double cy, double w, double h) {
    return BoundingBox(cx - w / 2.0, cy - h / 2.0, w, h);
}

}  // namespace

Scenario generate_scenario(const ScenarioSpec& spec) {
    Scenario out;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::int64_t next_clutter_tag = 1000000;

    int burst_remaining = 0;
    double burst_cx = spec.clutter_cx;
    double burst_cy = spec.clutter_cy;
    const int burst_len = std::max(1, spec.clutter_burst);
    const double burst_start_prob = spec.clutter_rate / burst_len;

    for (int frame = 1; frame <= spec.n_frames; ++frame) {
        std::vector<Detection>& dets = out.detections[frame];
        int index = 0;
        for (int k = 0; k < static_cast<int>(spec.targets.size()); ++k) {
            const TargetSpec& t = spec.targets[k];
            if (!target_alive(t, frame) || occluded(spec, k, frame)) continue;
            const auto [cx, cy] = interpolate(t, frame);
            out.gt.rows.push_back(GtRow{frame, k + 1, centered_box(cx, cy, t.width, t.height)});

            const double nx = spec.pos_noise > 0 ? gauss(rng) * spec.pos_noise : 0.0;
            const double ny = spec.pos_noise > 0 ? gauss(rng) * spec.pos_noise : 0.0;
            const double nw = spec.size_noise > 0 ? gauss(rng) * spec.size_noise : 0.0;
            const double nh = spec.size_noise > 0 ? gauss(rng) * spec.size_noise : 0.0;
            if (spec.dropout > 0 && uniform(rng) < spec.dropout) continue;

            Eigen::VectorXd sig = tag_signature(k + 1);
            if (spec.descriptor_noise > 0) {
                for (Eigen::Index i = 0; i < sig.size(); ++i)
                    sig(i) = std::abs(sig(i) + spec.descriptor_noise * gauss(rng));
                const double norm = sig.norm();
                if (norm > 0) sig /= norm;
            }
            Detection d(frame, index,
                        centered_box(cx + nx, cy + ny, std::max(2.0, t.width + nw),
                                     std::max(2.0, t.height + nh)),
                        1.0, AppearanceDescriptor::from_vector(std::move(sig)));
            out.tags[{frame, index}] = k + 1;
            dets.push_back(std::move(d));
            ++index;
        }

        if (spec.clutter_rate > 0) {
            if (burst_remaining == 0 && uniform(rng) < burst_start_prob) {
                burst_remaining = burst_len;
                burst_cx = spec.clutter_cx + gauss(rng) * 3.0 * spec.clutter_spread;
                burst_cy = spec.clutter_cy + gauss(rng) * 3.0 * spec.clutter_spread;
            }
            if (burst_remaining > 0) {
                --burst_remaining;
                const double cx = burst_cx + gauss(rng) * spec.clutter_spread;
                const double cy = burst_cy + gauss(rng) * spec.clutter_spread;
                const std::int64_t tag = next_clutter_tag++;
                Detection d(frame, index,
                            centered_box(cx, cy, spec.clutter_width, spec.clutter_height), 1.0,
                            AppearanceDescriptor::from_vector(tag_signature(tag)));
                out.tags[{frame, index}] = tag;
                dets.push_back(std::move(d));
                ++index;
            }
        }
        if (dets.empty()) out.detections.erase(frame);
    }
    return out;
}

std::map<int, std::vector<Detection>> with_tag_descriptors(const Scenario& s) {
    std::map<int, std::vector<Detection>> out;
    for (const auto& [frame, dets] : s.detections) {
        std::vector<Detection> tagged;
        tagged.reserve(dets.size());
        for (const Detection& d : dets) {
            const auto it = s.tags.find({frame, d.index});
            if (it == s.tags.end()) throw Error("scenario detection without identity tag");
            tagged.emplace_back(d.frame, d.index, d.box, d.raw_confidence,
                                AppearanceDescriptor::from_tag(it->second));
        }
        out[frame] = std::move(tagged);
    }
    return out;
}

ScenarioSpec crossing_scenario_spec(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.arena_w = 640;
    spec.arena_h = 480;
    spec.n_frames = 100;
    spec.fps = 10;
    spec.seed = seed;

    TargetSpec a;
    a.width = 30;
    a.height = 60;
    a.waypoints = {{1, 92, 240}, {39, 320, 240}, {100, 442, 240}};
    TargetSpec b = a;
    b.waypoints = {{1, 548, 240}, {39, 320, 240}, {100, 198, 240}};
    spec.targets = {a, b};

    // both targets vanish while they meet at the center
    spec.occlusions = {{0, 36, 43}, {1, 36, 43}};
    return spec;
}

}  // namespace tamatrack
