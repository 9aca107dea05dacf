#include <doctest.h>

#include "tamatrack/core.hpp"

using namespace tamatrack;

TEST_CASE("default configuration passes validation") {
    const TrackerConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));
    CHECK(cfg.beta_age == 2.0);
    CHECK(cfg.beta_intv == 0.2);
    CHECK(cfg.tau_hist == 0.6);
    CHECK(cfg.tau_iou == 0.5);
    CHECK(cfg.beta_dist == 0.8);
    CHECK(cfg.tau_shp == 0.8);
    CHECK(cfg.tau_init == 4);
    CHECK(cfg.beta_term == 2.0);
    CHECK(cfg.tau_match == 0.4);
    CHECK(cfg.tau_cue == 8);
    CHECK(cfg.lambda_c == 3.0);
    CHECK(cfg.lambda_f_histogram == 2.0);
    CHECK(cfg.lambda_f_embedding == 4.0);
    CHECK(cfg.tau_a == 0.6);
}

TEST_CASE("non-positive cue limit is rejected by name") {
    TrackerConfig cfg;
    cfg.tau_cue = 0;
    try {
        validate_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.name() == "NonPositiveCueLimit");
    }
}

TEST_CASE("lambda below one breaks the combination's convexity and is rejected") {
    TrackerConfig cfg;
    cfg.lambda_c = 0.5;  // c_rcnt can reach 1, so c_rcnt / lambda_c would exceed 1
    try {
        validate_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.name() == "LambdaBelowOne");
    }
}

TEST_CASE("derived threshold helpers") {
    TrackerConfig cfg;
    cfg.fps = 30;
    CHECK(cfg.termination_misses() == 60);
    cfg.fps = 25;
    CHECK(cfg.cue_min_interval() == 5);
    CHECK(cfg.cue_max_age() == doctest::Approx(50.0));
    cfg.fps = 7;  // 7 * 0.2 = 1.4 rounds to 1
    CHECK(cfg.cue_min_interval() == 1);
}

TEST_CASE("bounding box invariants and accessors") {
    CHECK_THROWS_AS(BoundingBox(0, 0, 0, 10), Error);
    CHECK_THROWS_AS(BoundingBox(0, 0, 10, -1), Error);
    const BoundingBox b(10, 20, 30, 60);
    CHECK(b.center_x() == doctest::Approx(25.0));
    CHECK(b.center_y() == doctest::Approx(50.0));
    CHECK(b.area() == doctest::Approx(1800.0));
}

TEST_CASE("detections clamp confidence on ingest and keep the raw score") {
    const Detection d(3, 0, BoundingBox(0, 0, 10, 10), 4.5);
    CHECK(d.confidence == 1.0);
    CHECK(d.raw_confidence == 4.5);
    const Detection low(3, 1, BoundingBox(0, 0, 10, 10), -0.25);
    CHECK(low.confidence == 0.0);
    CHECK_THROWS_AS(Detection(0, 0, BoundingBox(0, 0, 1, 1), 1.0), Error);
}

TEST_CASE("descriptor payload states") {
    const AppearanceDescriptor empty;
    CHECK(empty.empty());
    const AppearanceDescriptor none = AppearanceDescriptor::none();
    CHECK_FALSE(none.empty());
    CHECK(none.is_none());
    const AppearanceDescriptor tagged = AppearanceDescriptor::from_tag(42);
    CHECK(tagged.has_tag());
    CHECK(tagged.tag() == 42);
    CHECK_THROWS_AS(tagged.vector(), Error);

    // the feature view of a tag is a deterministic unit vector
    const AppearanceDescriptor same_tag = AppearanceDescriptor::from_tag(42);
    const auto& basis1 = tagged.feature_basis();
    const auto& basis2 = same_tag.feature_basis();
    CHECK(basis1.size() == 48);
    CHECK((basis1 - basis2).norm() == 0.0);
    CHECK(basis1.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(basis1.minCoeff() >= 0.0);
}

TEST_CASE("id source issues strictly increasing ids") {
    IdSource ids;
    int prev = 0;
    for (int i = 0; i < 100; ++i) {
        const int next = ids.next();
        CHECK(next > prev);
        prev = next;
    }
}

TEST_CASE("likelihood and init mode names round-trip") {
    for (const auto m : {LikelihoodMode::ctama, LikelihoodMode::deep_tama,
                         LikelihoodMode::baseline_linear, LikelihoodMode::baseline_select,
                         LikelihoodMode::iou_only})
        CHECK(parse_likelihood_mode(to_string(m)) == m);
    for (const auto m : {InitMode::hierarchical, InitMode::iou, InitMode::distance})
        CHECK(parse_init_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_likelihood_mode("nope"), Error);
}
