#include "tamatrack/cue.hpp"

namespace tamatrack {

HistoricalAppearanceCue prune_cue(HistoricalAppearanceCue cue, int current_frame,
                                  const TrackerConfig& cfg) {
    auto& e = cue.entries;
    const double max_age = cfg.cue_max_age();
    while (!e.empty() && (static_cast<int>(e.size()) > cfg.tau_cue ||
                          static_cast<double>(current_frame - e.front().frame) > max_age)) {
        e.erase(e.begin());
    }
    return cue;
}

HistoricalAppearanceCue maybe_add(HistoricalAppearanceCue cue, double c_rcnt,
                                  const AppearanceDescriptor& descriptor, int frame,
                                  const BoundingBox& box, const TrackerConfig& cfg) {
    const bool confident = c_rcnt > cfg.tau_hist;
    const bool spaced =
        cue.empty() || frame - cue.newest().frame >= cfg.cue_min_interval();
    if (confident && spaced) {
        cue.entries.push_back(CueEntry{c_rcnt, descriptor, frame, box});
        cue = prune_cue(std::move(cue), frame, cfg);
    }
    return cue;
}

}  // namespace tamatrack
