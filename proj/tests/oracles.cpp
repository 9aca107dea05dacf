#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace oracles {

namespace {

double sigmoid1(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = W * [h, x] (+ b), one row at a time
std::vector<double> project(const Eigen::MatrixXd& w_matrix, const std::vector<double>& h,
                            const std::vector<double>& x, const Eigen::VectorXd* bias) {
    const int rows = static_cast<int>(w_matrix.rows());
    std::vector<double> out(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        int col = 0;
        for (double v : h) acc += w_matrix(r, col++) * v;
        for (double v : x) acc += w_matrix(r, col++) * v;
        if (bias) acc += (*bias)(r);
        out[r] = acc;
    }
    return out;
}

}  // namespace

ScalarState lstm_forward_scalar(const tamatrack::LstmWeights& w,
                                const std::vector<std::vector<double>>& inputs) {
    ScalarState s;
    s.c.assign(w.d_hidden, 0.0);
    s.h.assign(w.d_hidden, 0.0);
    for (const std::vector<double>& x : inputs) {
        const auto zf = project(w.w_f, s.h, x, w.has_bias ? &w.b_f : nullptr);
        const auto zi = project(w.w_i, s.h, x, w.has_bias ? &w.b_i : nullptr);
        const auto zo = project(w.w_o, s.h, x, w.has_bias ? &w.b_o : nullptr);
        const auto zc = project(w.w_c, s.h, x, w.has_bias ? &w.b_c : nullptr);
        std::vector<double> c_next(w.d_hidden), h_next(w.d_hidden);
        for (int i = 0; i < w.d_hidden; ++i) {
            const double forget = sigmoid1(zf[i]);
            const double input = sigmoid1(zi[i]);
            const double output = sigmoid1(zo[i]);
            const double candidate = std::tanh(zc[i]);
            c_next[i] = forget * s.c[i] + input * candidate;
            h_next[i] = output * std::tanh(c_next[i]);
        }
        s.c = std::move(c_next);
        s.h = std::move(h_next);
    }
    return s;
}

double deep_tama_scalar(const tamatrack::LstmWeights& w,
                        const std::vector<std::vector<double>>& real_inputs) {
    std::vector<std::vector<double>> padded;
    for (int k = static_cast<int>(real_inputs.size()); k < w.n_cells; ++k)
        padded.emplace_back(w.d_in, 0.0);
    for (const auto& x : real_inputs) padded.push_back(x);
    const ScalarState s = lstm_forward_scalar(w, padded);
    double s_pos = w.has_bias ? w.b_pos : 0.0;
    double s_neg = w.has_bias ? w.b_neg : 0.0;
    for (int i = 0; i < w.d_hidden; ++i) {
        s_pos += w.w_pos(i) * s.h[i];
        s_neg += w.w_neg(i) * s.h[i];
    }
    const double epos = std::exp(s_pos);
    const double eneg = std::exp(s_neg);
    return epos / (epos + eneg);
}

double min_cost_enumeration(const Eigen::MatrixXd& cost,
                            std::vector<std::pair<int, int>>* best_pairs) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0 || m == 0) {
        if (best_pairs) best_pairs->clear();
        return 0.0;
    }
    if (n > m) {
        Eigen::MatrixXd t = cost.transpose();
        std::vector<std::pair<int, int>> swapped;
        const double v = min_cost_enumeration(t, best_pairs ? &swapped : nullptr);
        if (best_pairs) {
            best_pairs->clear();
            for (const auto& [a, b] : swapped) best_pairs->emplace_back(b, a);
            std::sort(best_pairs->begin(), best_pairs->end());
        }
        return v;
    }
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_assign;
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost(i, cols[i]);
        if (total < best) {
            best = total;
            best_assign.assign(cols.begin(), cols.begin() + n);
        }
    } while (std::next_permutation(cols.begin(), cols.end()));
    if (best_pairs) {
        best_pairs->clear();
        for (int i = 0; i < n; ++i) best_pairs->emplace_back(i, best_assign[i]);
        std::sort(best_pairs->begin(), best_pairs->end());
    }
    return best;
}

Eigen::Matrix4d random_spd4(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Matrix4d a;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = gauss(rng);
    return a * a.transpose() + 0.1 * Eigen::Matrix4d::Identity();
}

}  // namespace oracles
