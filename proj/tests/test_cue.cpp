#include <doctest.h>

#include <random>

#include "tamatrack/cue.hpp"

using namespace tamatrack;

namespace {

TrackerConfig fps25_config() {
    TrackerConfig cfg;
    cfg.fps = 25;  // interval round(25 * 0.2) = 5, max age 25 * 2 = 50
    return cfg;
}

CueEntry entry(double conf, int frame) {
    return CueEntry{conf, AppearanceDescriptor::from_tag(frame), frame,
                    BoundingBox(0, 0, 30, 60)};
}

// The age bound belongs to maintenance points (prune, or an add that pruned);
// a rejected candidate leaves the cue untouched, so it is checked separately.
bool invariants_hold(const HistoricalAppearanceCue& cue, int current_frame,
                     const TrackerConfig& cfg, bool maintained) {
    if (static_cast<int>(cue.size()) > cfg.tau_cue) return false;
    for (std::size_t k = 0; k < cue.size(); ++k) {
        if (!(cue.entries[k].confidence > cfg.tau_hist)) return false;
        if (k > 0) {
            if (cue.entries[k].frame <= cue.entries[k - 1].frame) return false;
            if (cue.entries[k].frame - cue.entries[k - 1].frame < cfg.cue_min_interval())
                return false;
        }
    }
    if (maintained && !cue.empty() && current_frame - cue.oldest().frame > cfg.cue_max_age())
        return false;
    return true;
}

}  // namespace

TEST_CASE("prune removes over-length entries oldest first") {
    const TrackerConfig cfg = fps25_config();
    HistoricalAppearanceCue cue;
    for (int k = 0; k < 9; ++k) cue.entries.push_back(entry(0.9, 1 + 5 * k));  // frames 1..41
    REQUIRE(cue.size() == 9);
    cue = prune_cue(std::move(cue), 41, cfg);
    CHECK(cue.size() == 8);
    CHECK(cue.oldest().frame == 6);  // the original first entry is gone
}

TEST_CASE("prune removes over-age entries") {
    const TrackerConfig cfg = fps25_config();
    HistoricalAppearanceCue cue;
    cue.entries.push_back(entry(0.9, 10));
    cue.entries.push_back(entry(0.9, 30));
    // age of the oldest at frame 61 is 51 > 50
    cue = prune_cue(std::move(cue), 61, cfg);
    CHECK(cue.size() == 1);
    CHECK(cue.oldest().frame == 30);
}

TEST_CASE("prune of an empty cue is a no-op") {
    const TrackerConfig cfg = fps25_config();
    HistoricalAppearanceCue cue;
    cue = prune_cue(std::move(cue), 1000, cfg);
    CHECK(cue.empty());
}

TEST_CASE("addition rules: confidence strictly above threshold, spaced gaps") {
    const TrackerConfig cfg = fps25_config();
    HistoricalAppearanceCue cue;
    const auto d = AppearanceDescriptor::from_tag(1);
    const BoundingBox box(0, 0, 30, 60);

    cue = maybe_add(std::move(cue), 0.7, d, 10, box, cfg);
    CHECK(cue.size() == 1);  // empty cue admits without a gap check

    cue = maybe_add(std::move(cue), 0.7, d, 15, box, cfg);
    CHECK(cue.size() == 2);  // gap 5 >= 5

    cue = maybe_add(std::move(cue), 0.7, d, 19, box, cfg);
    CHECK(cue.size() == 2);  // gap 4 < 5 rejected

    cue = maybe_add(std::move(cue), 0.6, d, 30, box, cfg);
    CHECK(cue.size() == 2);  // 0.6 is not strictly above tau_hist = 0.6

    cue = maybe_add(std::move(cue), 0.61, d, 30, box, cfg);
    CHECK(cue.size() == 3);
}

TEST_CASE("rejected candidates leave the cue byte-identical") {
    const TrackerConfig cfg = fps25_config();
    HistoricalAppearanceCue cue;
    cue.entries.push_back(entry(0.9, 10));
    const HistoricalAppearanceCue before = cue;
    cue = maybe_add(std::move(cue), 0.5, AppearanceDescriptor::from_tag(2), 20,
                    BoundingBox(0, 0, 1, 1), cfg);
    REQUIRE(cue.size() == before.size());
    CHECK(cue.entries[0].frame == before.entries[0].frame);
    CHECK(cue.entries[0].confidence == before.entries[0].confidence);
}

TEST_CASE("random op sequences never violate the four invariants") {
    const TrackerConfig cfg = fps25_config();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    std::uniform_int_distribution<int> advance(0, 6);
    std::uniform_int_distribution<int> op(0, 2);

    HistoricalAppearanceCue cue;
    int frame = 1;
    for (int it = 0; it < 20000; ++it) {
        frame += advance(rng);
        bool maintained;
        if (op(rng) == 0) {
            cue = prune_cue(std::move(cue), frame, cfg);
            maintained = true;
        } else {
            const std::size_t before = cue.size();
            cue = maybe_add(std::move(cue), conf(rng), AppearanceDescriptor::from_tag(it), frame,
                            BoundingBox(0, 0, 10, 20), cfg);
            maintained = cue.size() != before ||
                         (!cue.empty() && cue.newest().frame == frame);
        }
        REQUIRE(invariants_hold(cue, frame, cfg, maintained));
    }
}
