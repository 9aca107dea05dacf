#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "oracles.hpp"
#include "tamatrack/tama.hpp"

using namespace tamatrack;

namespace {

// score(obs, template) looked up by the template's tag; lets tests pin every
// pairwise score exactly
class TableScorer : public PairScorer {
public:
    explicit TableScorer(std::map<std::int64_t, double> table) : table_(std::move(table)) {}
    double score(const AppearanceDescriptor&, const AppearanceDescriptor& tmpl) const override {
        return table_.at(tmpl.tag());
    }

private:
    std::map<std::int64_t, double> table_;
};

Track track_with_cue(double c_rcnt, const std::vector<double>& cue_confs) {
    Track t;
    t.id = 1;
    t.recent_appearance = AppearanceDescriptor::from_tag(0);
    t.recent_box = BoundingBox(0, 0, 30, 60);
    t.recent_confidence = c_rcnt;
    for (std::size_t k = 0; k < cue_confs.size(); ++k)
        t.cue.entries.push_back(CueEntry{cue_confs[k],
                                         AppearanceDescriptor::from_tag(static_cast<int>(k) + 1),
                                         static_cast<int>(5 * (k + 1)),
                                         BoundingBox(0, 0, 30, 60)});
    return t;
}

Detection obs_at(double cx = 0, double cy = 0, double w = 30, double h = 60) {
    return Detection(1, 0, BoundingBox(cx - w / 2, cy - h / 2, w, h), 1.0,
                     AppearanceDescriptor::from_tag(99));
}

std::vector<std::vector<double>> to_scalar(const std::vector<Eigen::VectorXd>& xs) {
    std::vector<std::vector<double>> out;
    for (const auto& x : xs) out.emplace_back(x.data(), x.data() + x.size());
    return out;
}

}  // namespace

TEST_CASE("confidence-weighted combination reproduces the hand example") {
    // cue (c=0.5, s=0.3), (c=1.0, s=0.6); c_rcnt 0.6; s_rcnt 0.9; lambda 3
    // -> 0.2*0.9 + 0.8*(1/3*0.3 + 2/3*0.6) = 0.58
    const Track t = track_with_cue(0.6, {0.5, 1.0});
    const TableScorer scorer({{0, 0.9}, {1, 0.3}, {2, 0.6}});
    TrackerConfig cfg;
    cfg.lambda_c = 3.0;
    CHECK(ctama_likelihood(t, obs_at(), scorer, cfg) == doctest::Approx(0.58).epsilon(1e-12));
}

TEST_CASE("equal pairwise scores collapse to that score") {
    const Track t = track_with_cue(0.77, {0.9, 0.7, 0.65});
    const TableScorer scorer({{0, 0.42}, {1, 0.42}, {2, 0.42}, {3, 0.42}});
    TrackerConfig cfg;
    CHECK(ctama_likelihood(t, obs_at(), scorer, cfg) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("empty cue returns the recent-appearance score alone") {
    const Track t = track_with_cue(0.3, {});
    const TableScorer scorer({{0, 0.7}});
    TrackerConfig cfg;
    CHECK(ctama_likelihood(t, obs_at(), scorer, cfg) == doctest::Approx(0.7));
}

TEST_CASE("a track without any appearance is an error") {
    Track t;
    t.id = 9;
    const TableScorer scorer({});
    TrackerConfig cfg;
    CHECK_THROWS_AS(ctama_likelihood(t, obs_at(), scorer, cfg), EmptyTrackAppearance);
}

TEST_CASE("combination coefficients are a partition of one") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 8);
    for (int it = 0; it < 500; ++it) {
        const double c_rcnt = u(rng);
        std::vector<double> confs(len(rng));
        for (double& c : confs) c = 0.6 + 0.4 * u(rng);
        const auto coefs = ctama_coefficients(c_rcnt, 3.0, confs);
        REQUIRE(coefs.size() == confs.size() + 1);
        double sum = 0.0;
        for (double c : coefs) {
            CHECK(c >= 0.0);
            sum += c;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("likelihood is monotone in each pairwise score") {
    TrackerConfig cfg;
    const Track t = track_with_cue(0.5, {0.8, 0.9});
    std::map<std::int64_t, double> base{{0, 0.5}, {1, 0.4}, {2, 0.6}};
    const double v0 = ctama_likelihood(t, obs_at(), TableScorer(base), cfg);
    for (const auto& [key, _] : base) {
        auto bumped = base;
        bumped[key] += 0.2;
        const double v1 = ctama_likelihood(t, obs_at(), TableScorer(bumped), cfg);
        CHECK(v1 >= v0);
    }
}

TEST_CASE("gate arithmetic of the zero-weight cell") {
    const LstmWeights w = LstmWeights::zeros(4, 6, 3);
    const LstmState out = lstm_cell(Eigen::VectorXd::Ones(6), LstmState::zero(4), w);
    CHECK(out.c.norm() == 0.0);  // 0.5 * 0 + 0.5 * tanh(0)
    CHECK(out.h.norm() == 0.0);
}

TEST_CASE("cell output stays inside the unit box") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0, 1);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const LstmWeights w = LstmWeights::random(seed, 8, 10, 4, 1.5);
        LstmState s = LstmState::zero(8);
        for (int step = 0; step < 6; ++step) {
            Eigen::VectorXd x(10);
            for (int i = 0; i < 10; ++i) x(i) = gauss(rng);
            s = lstm_cell(x, s, w);
            for (int i = 0; i < 8; ++i) CHECK(std::abs(s.h(i)) < 1.0);
        }
    }
}

TEST_CASE("cell matches the scalar oracle on seeded random instances") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0, 1);
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const LstmWeights w = LstmWeights::random(seed, 16, 12, 5);
        std::vector<Eigen::VectorXd> inputs;
        for (int k = 0; k < 5; ++k) {
            Eigen::VectorXd x(12);
            for (int i = 0; i < 12; ++i) x(i) = gauss(rng);
            inputs.push_back(x);
        }
        const LstmState got = lstm_forward(inputs, w);
        const oracles::ScalarState want = oracles::lstm_forward_scalar(w, to_scalar(inputs));
        for (int i = 0; i < 16; ++i) {
            CHECK(std::abs(got.h(i) - want.h[i]) <= 1e-9);
            CHECK(std::abs(got.c(i) - want.c[i]) <= 1e-9);
        }
    }
}

TEST_CASE("relative shape difference is signed and scaled by the observation") {
    // template 60x110 against observation 50x100 -> (10/50, 10/100)
    const Eigen::Vector2d d = relative_shape_difference(BoundingBox(0, 0, 60, 110),
                                                        BoundingBox(0, 0, 50, 100));
    CHECK(d(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d(1) == doctest::Approx(0.1).epsilon(1e-12));
    const Eigen::Vector2d neg = relative_shape_difference(BoundingBox(0, 0, 40, 90),
                                                          BoundingBox(0, 0, 50, 100));
    CHECK(neg(0) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(neg(1) == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("equal projection vectors give one half regardless of input") {
    LstmWeights w = LstmWeights::random(777, 8, 152, 15);
    w.w_neg = w.w_pos;
    const SyntheticPairFeatureProvider provider;
    Track t = track_with_cue(0.9, {0.8});
    TrackerConfig cfg;
    const double v = deep_tama_likelihood(t, obs_at(), provider, w, cfg);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("all-zero gate weights give one half") {
    const LstmWeights w = LstmWeights::zeros(128, 152, 15);
    const SyntheticPairFeatureProvider provider;
    const Track t = track_with_cue(0.9, {0.7, 0.8});
    TrackerConfig cfg;
    CHECK(deep_tama_likelihood(t, obs_at(), provider, w, cfg) == 0.5);
}

TEST_CASE("sequence likelihood matches the scalar oracle end to end") {
    const SyntheticPairFeatureProvider provider;
    TrackerConfig cfg;
    for (std::uint64_t seed = 50; seed < 55; ++seed) {
        const LstmWeights w = LstmWeights::random(seed, 32, 152, 15, 0.2);
        Track t = track_with_cue(0.8, {0.7, 0.9, 0.8});
        const Detection obs = obs_at(0, 0, 50, 100);
        const double got = deep_tama_likelihood(t, obs, provider, w, cfg);
        const auto inputs = deep_tama_inputs(t, obs, provider, w);
        const double want = oracles::deep_tama_scalar(w, to_scalar(inputs));
        CHECK(std::abs(got - want) <= 1e-9);
        CHECK(got > 0.0);
        CHECK(got < 1.0);
    }
}

TEST_CASE("softmax is invariant to a constant shift of both projections") {
    const SyntheticPairFeatureProvider provider;
    TrackerConfig cfg;
    LstmWeights w = LstmWeights::random(888, 16, 152, 15, 0.3);
    const Track t = track_with_cue(0.6, {0.9});
    const Detection obs = obs_at(3, 4, 40, 70);
    const double before = deep_tama_likelihood(t, obs, provider, w, cfg);
    w.w_pos.array() += 0.37;
    w.w_neg.array() += 0.37;
    const double after = deep_tama_likelihood(t, obs, provider, w, cfg);
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("padding keeps the real inputs in the trailing cells") {
    const auto padded = pad_head({Eigen::VectorXd::Ones(4)}, 3, 4);
    REQUIRE(padded.size() == 3);
    CHECK(padded[0].norm() == 0.0);
    CHECK(padded[1].norm() == 0.0);
    CHECK(padded[2].norm() == doctest::Approx(2.0));
    CHECK_THROWS_AS(pad_head({Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(4)}, 1, 4),
                    DimensionMismatch);
}

TEST_CASE("cue longer than the cell budget is rejected") {
    const SyntheticPairFeatureProvider provider;
    TrackerConfig cfg;
    const LstmWeights w = LstmWeights::random(1, 8, 152, 3);
    const Track t = track_with_cue(0.8, {0.7, 0.8, 0.9});  // 3 entries + recent > 3 cells
    CHECK_THROWS_AS(deep_tama_likelihood(t, obs_at(), provider, w, cfg), DimensionMismatch);
}

TEST_CASE("weight files round-trip bit-exactly") {
    const std::string path = "weights_roundtrip.txt";
    LstmWeights w = LstmWeights::random(4242, 6, 11, 4, 0.7);
    save_lstm_weights(w, path);
    const LstmWeights r = load_lstm_weights(path);
    CHECK(r.d_hidden == 6);
    CHECK(r.d_in == 11);
    CHECK(r.n_cells == 4);
    CHECK((r.w_f - w.w_f).norm() == 0.0);
    CHECK((r.w_i - w.w_i).norm() == 0.0);
    CHECK((r.w_o - w.w_o).norm() == 0.0);
    CHECK((r.w_c - w.w_c).norm() == 0.0);
    CHECK((r.w_pos - w.w_pos).norm() == 0.0);
    CHECK((r.w_neg - w.w_neg).norm() == 0.0);

    w.has_bias = true;
    w.b_f.setConstant(0.25);
    w.b_pos = -1.5;
    save_lstm_weights(w, path);
    const LstmWeights rb = load_lstm_weights(path);
    CHECK(rb.has_bias);
    CHECK((rb.b_f - w.b_f).norm() == 0.0);
    CHECK(rb.b_pos == w.b_pos);
    std::remove(path.c_str());
}

TEST_CASE("default-shape weight files parse to the documented dimensions") {
    const std::string path = "weights_default.txt";
    save_lstm_weights(LstmWeights::zeros(128, 152, 15), path);
    const LstmWeights w = load_lstm_weights(path);
    CHECK(w.w_f.rows() == 128);
    CHECK(w.w_f.cols() == 280);
    CHECK(w.n_cells == 15);
    std::remove(path.c_str());
}

TEST_CASE("truncated weight files are rejected with a line number") {
    const std::string path = "weights_truncated.txt";
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        std::fputs("DTAMA-LSTM v1\nhidden=4 input=6 cells=3 bias=0\n1 2 3 4 5 6 7 8 9 10\n", f);
        std::fclose(f);
    }
    try {
        load_lstm_weights(path);
        FAIL("expected MalformedWeightFile");
    } catch (const MalformedWeightFile& e) {
        CHECK(e.line() >= 3);
    }
    std::remove(path.c_str());
}
