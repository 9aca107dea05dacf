#include <doctest.h>

#include <cmath>
#include <random>

#include "tamatrack/appearance.hpp"

using namespace tamatrack;

namespace {

Patch constant_patch(float r, float g, float b) {
    Patch p;
    for (int y = 0; y < Patch::kHeight; ++y)
        for (int x = 0; x < Patch::kWidth; ++x) {
            p.at(y, x, 0) = r;
            p.at(y, x, 1) = g;
            p.at(y, x, 2) = b;
        }
    return p;
}

Eigen::VectorXd random_unit48(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0, 1);
    Eigen::VectorXd v(48);
    for (int i = 0; i < 48; ++i) v(i) = std::abs(gauss(rng));
    return v / v.norm();
}

}  // namespace

TEST_CASE("all-black patch concentrates mass in six channel-zero bins") {
    const ColorHistogram h = extract_histogram(constant_patch(0, 0, 0));
    REQUIRE(h.bins.size() == 48);
    const double expected = 1.0 / std::sqrt(6.0);
    for (int c = 0; c < 6; ++c) CHECK(h.bins(8 * c) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(h.bins.sum() == doctest::Approx(6 * expected).epsilon(1e-12));
    CHECK(h.bins.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histograms are unit norm and position-free") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Patch p;
    for (auto& v : p.data) v = u(rng);
    const ColorHistogram h1 = extract_histogram(p);
    CHECK(h1.bins.norm() == doctest::Approx(1.0).epsilon(1e-9));

    // permute pixel positions: reverse the raster row order
    Patch q = p;
    for (int y = 0; y < Patch::kHeight; ++y)
        for (int x = 0; x < Patch::kWidth; ++x)
            for (int c = 0; c < 3; ++c)
                q.at(y, x, c) = p.at(Patch::kHeight - 1 - y, Patch::kWidth - 1 - x, c);
    const ColorHistogram h2 = extract_histogram(q);
    CHECK((h1.bins - h2.bins).norm() == 0.0);
}

TEST_CASE("histogram score: identity, orthogonality, hand value") {
    const ColorHistogram black{extract_histogram(constant_patch(0, 0, 0))};
    CHECK(histogram_score(black, black) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::VectorXd a = Eigen::VectorXd::Zero(48);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(48);
    a(0) = 1.0;
    b(1) = 1.0;
    CHECK(histogram_score(ColorHistogram{a}, ColorHistogram{b}) == 0.0);

    // unit vectors with inner product exactly 0.25 score 0.5
    Eigen::VectorXd c = Eigen::VectorXd::Zero(48);
    c(0) = 0.25;
    c(1) = std::sqrt(1.0 - 0.0625);
    CHECK(histogram_score(ColorHistogram{a}, ColorHistogram{c}) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("embedding score hand values and monotonicity") {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(8);
    CHECK(embedding_score(a, a) == doctest::Approx(1.0));
    Eigen::VectorXd b = a;
    b(0) = 1.0;  // squared distance 1
    CHECK(embedding_score(a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(embedding_score(a, b) == doctest::Approx(0.3679).epsilon(1e-3));
    Eigen::VectorXd c = a;
    double prev = 2.0;
    for (double d = 0.5; d <= 5.0; d += 0.5) {
        c(0) = d;
        const double v = embedding_score(a, c);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(embedding_score(a, Eigen::VectorXd::Zero(9)), DimensionMismatch);
}

TEST_CASE("oracle scorer contract") {
    const OracleScorer scorer(0.9, 0.1, 0.0);
    const auto a = AppearanceDescriptor::from_tag(7);
    const auto b = AppearanceDescriptor::from_tag(7);
    const auto c = AppearanceDescriptor::from_tag(8);
    CHECK(scorer.score(a, b) == doctest::Approx(0.9));
    CHECK(scorer.score(a, c) == doctest::Approx(0.1));
    CHECK(scorer.score(a, c) == scorer.score(c, a));  // deterministic and symmetric
    CHECK_THROWS_AS(scorer.score(a, AppearanceDescriptor::from_vector(Eigen::VectorXd::Zero(3))),
                    UntaggedDescriptor);

    const OracleScorer noisy(0.9, 0.1, 0.05);
    CHECK(noisy.score(a, c) == noisy.score(a, c));
    CHECK(noisy.score(a, c) == noisy.score(c, a));
}

TEST_CASE("pair feature blocks and fixed dimension") {
    const Eigen::VectorXd a = random_unit48(3);
    const Eigen::VectorXd f = synthetic_pair_feature(a, a);
    REQUIRE(f.size() == 150);
    CHECK(f.segment(0, 48).norm() == 0.0);    // |a-b|
    CHECK(f.segment(96, 48).norm() == 0.0);   // (a-b)^2
    CHECK(f(144) == 0.0);                     // L1
    CHECK(f(145) == 0.0);                     // L2
    CHECK(f(146) == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
    CHECK(f(147) == doctest::Approx(a.sum()).epsilon(1e-12));  // non-negative entries
    CHECK(f(148) == 0.0);                     // max abs diff
    CHECK(f(149) == doctest::Approx(1.0).epsilon(1e-12));      // cosine

    const Eigen::VectorXd b = random_unit48(4);
    const Eigen::VectorXd fab = synthetic_pair_feature(a, b);
    const Eigen::VectorXd fba = synthetic_pair_feature(b, a);
    CHECK((fab - fba).norm() == 0.0);  // symmetric in its arguments
    CHECK_THROWS_AS(synthetic_pair_feature(a, Eigen::VectorXd::Zero(47)), DimensionMismatch);
}

TEST_CASE("provider declares and enforces its dimension") {
    const SyntheticPairFeatureProvider provider;
    CHECK(provider.dimension() == 150);
    const auto a = AppearanceDescriptor::from_vector(random_unit48(1));
    const auto b = AppearanceDescriptor::from_vector(random_unit48(2));
    CHECK(provider.feature(a, b).size() == 150);
    const auto bad = AppearanceDescriptor::from_vector(Eigen::VectorXd::Zero(10));
    CHECK_THROWS_AS(provider.feature(a, bad), DimensionMismatch);
}

TEST_CASE("linear feature update endpoints and convexity") {
    const Eigen::VectorXd prev = random_unit48(10);
    const Eigen::VectorXd obs = random_unit48(11);
    CHECK((linear_feature_update(prev, obs, 0.0, 2.0) - prev).norm() == 0.0);
    // p = 1, lambda_f = 2 lands exactly on the midpoint
    const Eigen::VectorXd mid = linear_feature_update(prev, obs, 1.0, 2.0);
    CHECK((mid - 0.5 * (prev + obs)).norm() == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    for (int it = 0; it < 100; ++it) {
        const double p = u(rng);
        const Eigen::VectorXd out = linear_feature_update(prev, obs, p, 2.0);
        // output lies on the segment: out - prev is parallel to obs - prev with ratio in [0,1]
        const double ratio = (out - prev).norm() / (obs - prev).norm();
        CHECK(ratio >= 0.0);
        CHECK(ratio <= 1.0 + 1e-12);
        const Eigen::VectorXd reconstructed = prev + ratio * (obs - prev);
        CHECK((out - reconstructed).norm() < 1e-9);
    }
}

TEST_CASE("selection update switches strictly above the threshold") {
    const Eigen::VectorXd prev = random_unit48(20);
    const Eigen::VectorXd obs = random_unit48(21);
    CHECK((select_feature_update(prev, obs, 0.7, 0.6) - obs).norm() == 0.0);
    CHECK((select_feature_update(prev, obs, 0.6, 0.6) - prev).norm() == 0.0);
    CHECK((select_feature_update(prev, obs, 0.0, 0.6) - prev).norm() == 0.0);
}

TEST_CASE("every scorer returns 1 on identical payloads and stays in range") {
    const HistogramScorer hist;
    const EmbeddingScorer embed;
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<float> uf(0.0f, 1.0f);
    Patch p;
    for (auto& v : p.data) v = uf(rng);
    const auto dp = AppearanceDescriptor::from_patch(p);
    CHECK(hist.score(dp, dp) == doctest::Approx(1.0).epsilon(1e-9));

    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        const auto a = AppearanceDescriptor::from_vector(random_unit48(seed));
        const auto b = AppearanceDescriptor::from_vector(random_unit48(seed + 100));
        for (const PairScorer* s : {static_cast<const PairScorer*>(&hist),
                                    static_cast<const PairScorer*>(&embed)}) {
            const double v = s->score(a, b);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(s->score(a, a) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}
