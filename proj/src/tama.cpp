#include "tamatrack/tama.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tamatrack/numio.hpp"

namespace tamatrack {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& x) {
    return x.unaryExpr([](double v) { return std::tanh(v); });
}

}  // namespace

LstmWeights LstmWeights::zeros(int hidden, int input, int cells) {
    LstmWeights w;
    w.d_hidden = hidden;
    w.d_in = input;
    w.n_cells = cells;
    const int cols = hidden + input;
    w.w_f = Eigen::MatrixXd::Zero(hidden, cols);
    w.w_i = Eigen::MatrixXd::Zero(hidden, cols);
    w.w_o = Eigen::MatrixXd::Zero(hidden, cols);
    w.w_c = Eigen::MatrixXd::Zero(hidden, cols);
    w.w_pos = Eigen::VectorXd::Zero(hidden);
    w.w_neg = Eigen::VectorXd::Zero(hidden);
    w.b_f = Eigen::VectorXd::Zero(hidden);
    w.b_i = Eigen::VectorXd::Zero(hidden);
    w.b_o = Eigen::VectorXd::Zero(hidden);
    w.b_c = Eigen::VectorXd::Zero(hidden);
    return w;
}

LstmWeights LstmWeights::random(std::uint64_t seed, int hidden, int input, int cells,
                                double scale) {
    LstmWeights w = zeros(hidden, input, cells);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    auto fill = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = gauss(rng);
    };
    fill(w.w_f);
    fill(w.w_i);
    fill(w.w_o);
    fill(w.w_c);
    for (int i = 0; i < hidden; ++i) w.w_pos(i) = gauss(rng);
    for (int i = 0; i < hidden; ++i) w.w_neg(i) = gauss(rng);
    return w;
}

void LstmWeights::check_dimensions() const {
    const int cols = d_hidden + d_in;
    auto bad = [&](const Eigen::MatrixXd& m) {
        return m.rows() != d_hidden || m.cols() != cols;
    };
    if (d_hidden < 1 || d_in < 3 || n_cells < 1)
        throw DimensionMismatch("weight header dimensions out of range");
    if (bad(w_f) || bad(w_i) || bad(w_o) || bad(w_c))
        throw DimensionMismatch("gate matrices must all be d_hidden x (d_hidden + d_in)");
    if (w_pos.size() != d_hidden || w_neg.size() != d_hidden)
        throw DimensionMismatch("projection vectors must have dimension d_hidden");
    if (has_bias && (b_f.size() != d_hidden || b_i.size() != d_hidden || b_o.size() != d_hidden ||
                     b_c.size() != d_hidden))
        throw DimensionMismatch("bias vectors must have dimension d_hidden");
}

LstmState lstm_cell(const Eigen::VectorXd& f_in, const LstmState& prev, const LstmWeights& w) {
    if (f_in.size() != w.d_in)
        throw DimensionMismatch("cell input size " + std::to_string(f_in.size()) +
                                " but weights expect " + std::to_string(w.d_in));
    if (prev.h.size() != w.d_hidden || prev.c.size() != w.d_hidden)
        throw DimensionMismatch("previous state size does not match d_hidden");

    Eigen::VectorXd joint(w.d_hidden + w.d_in);
    joint << prev.h, f_in;

    Eigen::VectorXd zf = w.w_f * joint;
    Eigen::VectorXd zi = w.w_i * joint;
    Eigen::VectorXd zo = w.w_o * joint;
    Eigen::VectorXd zc = w.w_c * joint;
    if (w.has_bias) {
        zf += w.b_f;
        zi += w.b_i;
        zo += w.b_o;
        zc += w.b_c;
    }

    const Eigen::VectorXd forget = sigmoid(zf);
    const Eigen::VectorXd input = sigmoid(zi);
    const Eigen::VectorXd output = sigmoid(zo);
    const Eigen::VectorXd candidate = tanh_vec(zc);

    LstmState next;
    next.c = forget.cwiseProduct(prev.c) + input.cwiseProduct(candidate);
    next.h = output.cwiseProduct(tanh_vec(next.c));
    return next;
}

LstmState lstm_forward(const std::vector<Eigen::VectorXd>& inputs, const LstmWeights& w) {
    LstmState state = LstmState::zero(w.d_hidden);
    for (const auto& f_in : inputs) state = lstm_cell(f_in, state, w);
    return state;
}

std::vector<Eigen::VectorXd> pad_head(std::vector<Eigen::VectorXd> inputs, int n_cells,
                                      int d_in) {
    if (static_cast<int>(inputs.size()) > n_cells)
        throw DimensionMismatch("sequence longer than the cell count");
    std::vector<Eigen::VectorXd> padded;
    padded.reserve(n_cells);
    for (int k = static_cast<int>(inputs.size()); k < n_cells; ++k)
        padded.push_back(Eigen::VectorXd::Zero(d_in));
    for (auto& v : inputs) padded.push_back(std::move(v));
    return padded;
}

Eigen::Vector2d relative_shape_difference(const BoundingBox& template_box,
                                          const BoundingBox& observation_box) {
    return Eigen::Vector2d(
        (template_box.width - observation_box.width) / observation_box.width,
        (template_box.height - observation_box.height) / observation_box.height);
}

std::vector<double> ctama_coefficients(double c_rcnt, double lambda_c,
                                       const std::vector<double>& cue_confidences) {
    std::vector<double> coefs;
    coefs.reserve(cue_confidences.size() + 1);
    if (cue_confidences.empty()) {
        coefs.push_back(1.0);
        return coefs;
    }
    const double w_rcnt = c_rcnt / lambda_c;
    coefs.push_back(w_rcnt);
    double sum = 0.0;
    for (double c : cue_confidences) sum += c;
    const double rest = 1.0 - w_rcnt;
    if (sum > 0.0) {
        for (double c : cue_confidences) coefs.push_back(rest * (c / sum));
    } else {
        const double uniform = rest / static_cast<double>(cue_confidences.size());
        for (std::size_t i = 0; i < cue_confidences.size(); ++i) coefs.push_back(uniform);
    }
    return coefs;
}

double ctama_combine(double c_rcnt, double lambda_c, double recent_score,
                     const std::vector<double>& cue_confidences,
                     const std::vector<double>& cue_scores) {
    const std::vector<double> coefs = ctama_coefficients(c_rcnt, lambda_c, cue_confidences);
    double out = coefs[0] * recent_score;
    for (std::size_t k = 0; k < cue_scores.size(); ++k) out += coefs[k + 1] * cue_scores[k];
    // the coefficient sum can round a hair past one; keep the unit range exact
    return std::min(1.0, out);
}

double ctama_likelihood(const Track& track, const Detection& obs, const PairScorer& scorer,
                        const TrackerConfig& cfg) {
    if (track.recent_appearance.empty())
        throw EmptyTrackAppearance("track " + std::to_string(track.id) +
                                   " has no recent appearance");
    const double s_rcnt = scorer.score(obs.descriptor, track.recent_appearance);
    if (track.cue.empty()) return s_rcnt;

    std::vector<double> confs;
    std::vector<double> scores;
    confs.reserve(track.cue.size());
    scores.reserve(track.cue.size());
    for (const CueEntry& e : track.cue.entries) {
        confs.push_back(e.confidence);
        scores.push_back(scorer.score(obs.descriptor, e.descriptor));
    }
    return ctama_combine(track.recent_confidence, cfg.lambda_c, s_rcnt, confs, scores);
}

std::vector<Eigen::VectorXd> deep_tama_inputs(const Track& track, const Detection& obs,
                                              const PairFeatureProvider& provider,
                                              const LstmWeights& w) {
    if (track.recent_appearance.empty())
        throw EmptyTrackAppearance("track " + std::to_string(track.id) +
                                   " has no recent appearance");
    if (provider.dimension() + 2 != w.d_in)
        throw DimensionMismatch("provider dimension " + std::to_string(provider.dimension()) +
                                " + 2 does not match weight input " + std::to_string(w.d_in));
    if (static_cast<int>(track.cue.size()) + 1 > w.n_cells)
        throw DimensionMismatch("cue length exceeds the cell budget");

    std::vector<Eigen::VectorXd> inputs;
    inputs.reserve(track.cue.size() + 1);
    auto cell_input = [&](const AppearanceDescriptor& tmpl, const BoundingBox& tmpl_box) {
        const Eigen::VectorXd fm = provider.feature(tmpl, obs.descriptor);
        if (fm.size() != provider.dimension())
            throw DimensionMismatch("provider returned a feature of unexpected size");
        Eigen::VectorXd f(w.d_in);
        f << fm, relative_shape_difference(tmpl_box, obs.box);
        return f;
    };
    for (const CueEntry& e : track.cue.entries) inputs.push_back(cell_input(e.descriptor, e.box));
    inputs.push_back(cell_input(track.recent_appearance, track.recent_box));
    return inputs;
}

double deep_tama_from_inputs(std::vector<Eigen::VectorXd> real_inputs, const LstmWeights& w) {
    const LstmState last =
        lstm_forward(pad_head(std::move(real_inputs), w.n_cells, w.d_in), w);
    double s_pos = w.w_pos.dot(last.h);
    double s_neg = w.w_neg.dot(last.h);
    if (w.has_bias) {
        s_pos += w.b_pos;
        s_neg += w.b_neg;
    }
    return 1.0 / (1.0 + std::exp(s_neg - s_pos));
}

double deep_tama_likelihood(const Track& track, const Detection& obs,
                            const PairFeatureProvider& provider, const LstmWeights& w,
                            const TrackerConfig& cfg) {
    (void)cfg;
    return deep_tama_from_inputs(deep_tama_inputs(track, obs, provider, w), w);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

Eigen::VectorXd parse_float_line(const std::string& line, int expected, int line_no) {
    const auto tokens = split_ws(line);
    if (static_cast<int>(tokens.size()) != expected)
        throw MalformedWeightFile(line_no, "expected " + std::to_string(expected) +
                                               " values, found " +
                                               std::to_string(tokens.size()));
    Eigen::VectorXd v(expected);
    for (int i = 0; i < expected; ++i) {
        bool ok = false;
        v(i) = parse_double(tokens[i], ok);
        if (!ok) throw MalformedWeightFile(line_no, "bad float token");
    }
    return v;
}

}  // namespace

LstmWeights load_lstm_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open weight file: " + path);

    int line_no = 0;
    std::string line;
    auto next_line = [&]() {
        if (!std::getline(in, line))
            throw MalformedWeightFile(line_no + 1, "unexpected end of file");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };

    next_line();
    if (line != "DTAMA-LSTM v1") throw MalformedWeightFile(line_no, "bad magic line");

    next_line();
    int hidden = -1, input = -1, cells = -1, bias = -1;
    for (const auto tok : split_ws(line)) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) throw MalformedWeightFile(line_no, "bad header token");
        const auto key = tok.substr(0, eq);
        bool ok = false;
        const long val = parse_long(tok.substr(eq + 1), ok);
        if (!ok) throw MalformedWeightFile(line_no, "bad header value");
        if (key == "hidden")
            hidden = static_cast<int>(val);
        else if (key == "input")
            input = static_cast<int>(val);
        else if (key == "cells")
            cells = static_cast<int>(val);
        else if (key == "bias")
            bias = static_cast<int>(val);
        else
            throw MalformedWeightFile(line_no, "unknown header key");
    }
    if (hidden < 1 || input < 3 || cells < 1 || bias < 0 || bias > 1)
        throw MalformedWeightFile(line_no, "incomplete or out-of-range header");

    LstmWeights w = LstmWeights::zeros(hidden, input, cells);
    w.has_bias = bias == 1;
    const int cols = hidden + input;
    for (Eigen::MatrixXd* m : {&w.w_f, &w.w_i, &w.w_o, &w.w_c}) {
        for (int r = 0; r < hidden; ++r) {
            next_line();
            m->row(r) = parse_float_line(line, cols, line_no).transpose();
        }
    }
    next_line();
    w.w_pos = parse_float_line(line, hidden, line_no);
    next_line();
    w.w_neg = parse_float_line(line, hidden, line_no);
    if (w.has_bias) {
        for (Eigen::VectorXd* b : {&w.b_f, &w.b_i, &w.b_o, &w.b_c}) {
            next_line();
            *b = parse_float_line(line, hidden, line_no);
        }
        next_line();
        const Eigen::VectorXd proj = parse_float_line(line, 2, line_no);
        w.b_pos = proj(0);
        w.b_neg = proj(1);
    }
    w.check_dimensions();
    return w;
}

void save_lstm_weights(const LstmWeights& w, const std::string& path) {
    w.check_dimensions();
    std::ofstream out(path, std::ios::binary);  // LF endings on every platform
    if (!out) throw IoError("cannot open weight file for writing: " + path);
    out << "DTAMA-LSTM v1\n";
    out << "hidden=" << w.d_hidden << " input=" << w.d_in << " cells=" << w.n_cells
        << " bias=" << (w.has_bias ? 1 : 0) << "\n";
    auto write_row = [&](const Eigen::VectorXd& row) {
        for (Eigen::Index i = 0; i < row.size(); ++i) {
            if (i) out << ' ';
            out << format_double(row(i));
        }
        out << '\n';
    };
    for (const Eigen::MatrixXd* m : {&w.w_f, &w.w_i, &w.w_o, &w.w_c})
        for (Eigen::Index r = 0; r < m->rows(); ++r) write_row(m->row(r).transpose());
    write_row(w.w_pos);
    write_row(w.w_neg);
    if (w.has_bias) {
        for (const Eigen::VectorXd* b : {&w.b_f, &w.b_i, &w.b_o, &w.b_c}) write_row(*b);
        out << format_double(w.b_pos) << ' ' << format_double(w.b_neg) << '\n';
    }
    if (!out) throw IoError("write failure: " + path);
}

}  // namespace tamatrack
