#include "tamatrack/engine.hpp"

#include <algorithm>

#include "tamatrack/cue.hpp"
#include "tamatrack/geometry.hpp"

namespace tamatrack {

Engine::Engine(TrackerConfig cfg, AppearanceModel model)
    : cfg_(validate_config(cfg)), model_(model) {
    switch (cfg_.likelihood_mode) {
        case LikelihoodMode::deep_tama:
            if (!model_.provider || !model_.weights)
                throw ConfigError("MissingAppearanceBackend",
                                  "deep_tama needs a feature provider and weights");
            if (cfg_.tau_cue > model_.weights->n_cells - 1)
                throw ConfigError("CueExceedsCellBudget",
                                  "tau_cue must be at most cells - 1 of the weights");
            break;
        case LikelihoodMode::iou_only:
            break;
        default:
            if (!model_.scorer)
                throw ConfigError("MissingAppearanceBackend",
                                  "this likelihood mode needs a pairwise scorer");
    }
}

namespace {

// Baseline feature maintenance: tracks keep one appearance feature updated per
// match instead of the template history.
AppearanceDescriptor updated_baseline_appearance(const Track& track, const Detection& det,
                                                 double match_likelihood,
                                                 const TrackerConfig& cfg, double lambda_f) {
    if (cfg.likelihood_mode == LikelihoodMode::baseline_select) {
        return match_likelihood > cfg.tau_a ? det.descriptor : track.recent_appearance;
    }
    // linear blend over the feature bases; identity tags cannot blend, so the
    // newest template wins
    const AppearanceDescriptor& prev = track.recent_appearance;
    const AppearanceDescriptor& obs = det.descriptor;
    if (prev.has_tag() || obs.has_tag() || prev.is_none() || obs.is_none() || prev.empty() ||
        obs.empty())
        return obs;
    const Eigen::VectorXd& f_prev = prev.feature_basis();
    const Eigen::VectorXd& f_obs = obs.feature_basis();
    if (f_prev.size() != f_obs.size()) return obs;
    return AppearanceDescriptor::from_vector(
        linear_feature_update(f_prev, f_obs, match_likelihood, lambda_f));
}

}  // namespace

FrameEvents Engine::step(int frame, const std::vector<Detection>& dets) {
    if (frame <= current_frame_)
        throw NonMonotoneFrame("step frame " + std::to_string(frame) +
                               " does not advance past " + std::to_string(current_frame_));
    for (const Detection& d : dets)
        if (d.frame != frame)
            throw Error("detection frame " + std::to_string(d.frame) +
                        " does not match step frame " + std::to_string(frame));

    FrameEvents events;

    for (Track& t : tracks_) {
        t.cue = prune_cue(std::move(t.cue), frame, cfg_);
        t = kalman_predict(t, cfg_.geometry);
    }

    std::vector<char> det_matched(dets.size(), 0);
    std::vector<char> track_matched(tracks_.size(), 0);

    if (!tracks_.empty() && !dets.empty()) {
        const SimilarityMatrix sim = build_similarity(tracks_, dets, cfg_, model_);
        const Assignment assign = hungarian(-sim.values);
        const auto [valid, missed] = validate_matches(assign, sim, cfg_.tau_match);

        for (const auto& [i, j] : valid.pairs) {
            Track& t = tracks_[i];
            const Detection& d = dets[j];
            const double likelihood = sim.values(i, j);

            t.recent_confidence = likelihood;
            if (cfg_.likelihood_mode == LikelihoodMode::baseline_linear ||
                cfg_.likelihood_mode == LikelihoodMode::baseline_select) {
                t.recent_appearance =
                    updated_baseline_appearance(t, d, likelihood, cfg_, model_.lambda_f);
            } else {
                t.recent_appearance = d.descriptor;
            }
            t.recent_box = d.box;
            t.cue = maybe_add(std::move(t.cue), likelihood, d.descriptor, frame, d.box, cfg_);
            t = kalman_update(t, d, cfg_.geometry);
            t.miss_count = 0;
            t.last_matched_frame = frame;

            det_matched[j] = 1;
            track_matched[i] = 1;
            events.matches.emplace_back(t.id, j);
            rows_.push_back(ResultRow{frame, t.id, d.box});
        }
    }

    for (std::size_t i = 0; i < tracks_.size(); ++i)
        if (!track_matched[i]) ++tracks_[i].miss_count;

    tracks_ = apply_termination(std::move(tracks_), cfg_);
    {
        std::vector<Track> alive;
        alive.reserve(tracks_.size());
        for (Track& t : tracks_) {
            if (t.status == TrackStatus::terminated)
                events.terminations.push_back(t.id);
            else
                alive.push_back(std::move(t));
        }
        tracks_ = std::move(alive);
    }

    std::vector<Detection> unmatched;
    for (std::size_t j = 0; j < dets.size(); ++j)
        if (!det_matched[j]) unmatched.push_back(dets[j]);
    trees_ = extend_trees(std::move(trees_), unmatched, cfg_);

    for (PromotedTrack& p : promote_trees(trees_, cfg_, ids_)) {
        events.births.push_back(p.track.id);
        for (const Detection& d : p.path)
            rows_.push_back(ResultRow{d.frame, p.track.id, d.box});
        tracks_.push_back(std::move(p.track));
    }

    current_frame_ = frame;
    return events;
}

std::vector<ResultRow> Engine::sorted_results() const {
    std::vector<ResultRow> rows = rows_;
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });
    return rows;
}

std::vector<ResultRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                    const std::vector<int>& frames, const TrackerConfig& cfg,
                                    const AppearanceModel& model) {
    Engine engine(cfg, model);
    static const std::vector<Detection> kNone;
    for (int frame : frames) {
        const auto it = dets_by_frame.find(frame);
        engine.step(frame, it == dets_by_frame.end() ? kNone : it->second);
    }
    return engine.sorted_results();
}

std::vector<ResultRow> run_sequence(const std::map<int, std::vector<Detection>>& dets_by_frame,
                                    const TrackerConfig& cfg, const AppearanceModel& model) {
    std::vector<int> frames;
    if (!dets_by_frame.empty()) {
        const int last = dets_by_frame.rbegin()->first;
        frames.reserve(last);
        for (int f = 1; f <= last; ++f) frames.push_back(f);
    }
    return run_sequence(dets_by_frame, frames, cfg, model);
}

}  // namespace tamatrack
