#include "tamatrack/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tamatrack/geometry.hpp"
#include "tamatrack/threading.hpp"

namespace tamatrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment on a square matrix with potentials.
// Returns row -> column. Scan order is fixed, so the result is deterministic.
std::vector<int> solve_square(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

// Among equal-total-cost solutions, prefer the one whose (row, column) pair
// list is lexicographically lowest: bubble equal-cost column swaps toward
// lower columns for lower rows. Dummy columns rank after every real one.
void normalize_ties(const Eigen::MatrixXd& padded, int n_rows, int n_cols,
                    std::vector<int>& row_to_col) {
    const int s = static_cast<int>(padded.rows());
    auto col_key = [&](int j) { return j < n_cols ? j : s; };
    bool changed = true;
    int guard = 0;
    while (changed && guard++ < s * s) {
        changed = false;
        for (int a = 0; a < s; ++a) {
            if (a >= n_rows) break;  // dummy rows cannot lead a preference swap
            for (int b = a + 1; b < s; ++b) {
                const int ja = row_to_col[a];
                const int jb = row_to_col[b];
                if (col_key(jb) >= col_key(ja)) continue;
                const double before = padded(a, ja) + padded(b, jb);
                const double after = padded(a, jb) + padded(b, ja);
                if (after == before) {
                    std::swap(row_to_col[a], row_to_col[b]);
                    changed = true;
                }
            }
        }
    }
}

}  // namespace

Assignment hungarian(const Eigen::MatrixXd& cost) {
    Assignment out;
    const int n_rows = static_cast<int>(cost.rows());
    const int n_cols = static_cast<int>(cost.cols());
    if (n_rows == 0 || n_cols == 0) return out;

    const int s = std::max(n_rows, n_cols);
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(s, s);
    padded.topLeftCorner(n_rows, n_cols) = cost;

    std::vector<int> row_to_col = solve_square(padded);
    normalize_ties(padded, n_rows, n_cols, row_to_col);

    for (int i = 0; i < n_rows; ++i) {
        const int j = row_to_col[i];
        if (j < n_cols) out.pairs.emplace_back(i, j);
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

std::pair<Assignment, std::set<int>> validate_matches(const Assignment& assign,
                                                      const SimilarityMatrix& sim,
                                                      double tau_match) {
    Assignment valid;
    std::set<int> missed;
    std::vector<char> assigned(sim.rows(), 0);
    for (const auto& [i, j] : assign.pairs) {
        assigned[i] = 1;
        if (sim.values(i, j) > tau_match)
            valid.pairs.emplace_back(i, j);
        else
            missed.insert(i);
    }
    for (int i = 0; i < sim.rows(); ++i)
        if (!assigned[i]) missed.insert(i);
    return {std::move(valid), std::move(missed)};
}

namespace {

struct GateResult {
    Eigen::MatrixXd geo;       // p_m * p_s
    Eigen::MatrixXd motion;    // p_m
    std::vector<std::pair<int, int>> surviving;
};

GateResult gate_pairs(const std::vector<Track>& tracks, const std::vector<Detection>& dets,
                      const TrackerConfig& cfg) {
    const int n = static_cast<int>(tracks.size());
    const int m = static_cast<int>(dets.size());
    GateResult g;
    g.geo = Eigen::MatrixXd::Zero(n, m);
    g.motion = Eigen::MatrixXd::Zero(n, m);
    parallel_for(n * m, cfg.threads, [&](int k) {
        const int i = k / m;
        const int j = k % m;
        const double pm = motion_likelihood(tracks[i], dets[j], cfg.geometry);
        const double ps = shape_likelihood(tracks[i].box(), dets[j].box, cfg.geometry);
        g.motion(i, j) = pm;
        g.geo(i, j) = pm * ps;
    });
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (g.geo(i, j) > cfg.tau_match) g.surviving.emplace_back(i, j);
    return g;
}

double baseline_appearance(const Track& track, const Detection& det, const PairScorer& scorer) {
    if (track.recent_appearance.empty())
        throw EmptyTrackAppearance("track " + std::to_string(track.id) +
                                   " has no recent appearance");
    return scorer.score(det.descriptor, track.recent_appearance);
}

SimilarityMatrix similarity_shell(int n, int m) {
    SimilarityMatrix sim;
    sim.values = Eigen::MatrixXd::Zero(n, m);
    sim.valid = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, m, false);
    return sim;
}

SimilarityMatrix build_iou_only(const std::vector<Track>& tracks,
                                const std::vector<Detection>& dets, const TrackerConfig& cfg) {
    SimilarityMatrix sim = similarity_shell(static_cast<int>(tracks.size()),
                                            static_cast<int>(dets.size()));
    const int m = sim.cols();
    parallel_for(sim.rows() * m, cfg.threads, [&](int k) {
        const int i = k / m;
        const int j = k % m;
        sim.values(i, j) = iou(tracks[i].box(), dets[j].box);
        sim.valid(i, j) = true;
    });
    return sim;
}

}  // namespace

SimilarityMatrix build_similarity(const std::vector<Track>& tracks,
                                  const std::vector<Detection>& dets, const TrackerConfig& cfg,
                                  const AppearanceModel& model) {
    const int n = static_cast<int>(tracks.size());
    const int m = static_cast<int>(dets.size());
    if (cfg.likelihood_mode == LikelihoodMode::iou_only) return build_iou_only(tracks, dets, cfg);

    SimilarityMatrix sim = similarity_shell(n, m);
    const GateResult gate = gate_pairs(tracks, dets, cfg);
    const auto& pairs = gate.surviving;
    const int n_pairs = static_cast<int>(pairs.size());

    std::vector<double> appearance(n_pairs, 0.0);

    switch (cfg.likelihood_mode) {
        case LikelihoodMode::ctama: {
            // stage one: every (template, observation) pairwise score
            struct Task {
                int pair;
                int slot;  // 0 = recent appearance, 1.. = cue entries
            };
            std::vector<Task> tasks;
            std::vector<int> first_task(n_pairs, 0);
            for (int p = 0; p < n_pairs; ++p) {
                first_task[p] = static_cast<int>(tasks.size());
                const Track& t = tracks[pairs[p].first];
                tasks.push_back(Task{p, 0});
                for (int k = 0; k < static_cast<int>(t.cue.size()); ++k)
                    tasks.push_back(Task{p, k + 1});
            }
            std::vector<double> scores(tasks.size(), 0.0);
            parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int idx) {
                const Task& task = tasks[idx];
                const Track& t = tracks[pairs[task.pair].first];
                const Detection& d = dets[pairs[task.pair].second];
                if (t.recent_appearance.empty())
                    throw EmptyTrackAppearance("track " + std::to_string(t.id) +
                                               " has no recent appearance");
                const AppearanceDescriptor& tmpl =
                    task.slot == 0 ? t.recent_appearance : t.cue.entries[task.slot - 1].descriptor;
                scores[idx] = model.scorer->score(d.descriptor, tmpl);
            });
            // stage two: per-pair confidence-weighted combination
            for (int p = 0; p < n_pairs; ++p) {
                const Track& t = tracks[pairs[p].first];
                const double s_rcnt = scores[first_task[p]];
                if (t.cue.empty()) {
                    appearance[p] = s_rcnt;
                    continue;
                }
                std::vector<double> confs, cue_scores;
                confs.reserve(t.cue.size());
                cue_scores.reserve(t.cue.size());
                for (int k = 0; k < static_cast<int>(t.cue.size()); ++k) {
                    confs.push_back(t.cue.entries[k].confidence);
                    cue_scores.push_back(scores[first_task[p] + 1 + k]);
                }
                appearance[p] =
                    ctama_combine(t.recent_confidence, cfg.lambda_c, s_rcnt, confs, cue_scores);
            }
            break;
        }
        case LikelihoodMode::deep_tama: {
            if (model.provider->dimension() + 2 != model.weights->d_in)
                throw DimensionMismatch("provider dimension " +
                                        std::to_string(model.provider->dimension()) +
                                        " + 2 does not match weight input " +
                                        std::to_string(model.weights->d_in));
            // stage one: matching features of every surviving template pair
            struct Task {
                int pair;
                int slot;
            };
            std::vector<Task> tasks;
            std::vector<int> first_task(n_pairs, 0);
            for (int p = 0; p < n_pairs; ++p) {
                first_task[p] = static_cast<int>(tasks.size());
                const Track& t = tracks[pairs[p].first];
                if (static_cast<int>(t.cue.size()) + 1 > model.weights->n_cells)
                    throw DimensionMismatch("cue length exceeds the cell budget");
                for (int k = 0; k < static_cast<int>(t.cue.size()); ++k)
                    tasks.push_back(Task{p, k});
                tasks.push_back(Task{p, static_cast<int>(t.cue.size())});
            }
            std::vector<Eigen::VectorXd> cell_inputs(tasks.size());
            parallel_for(static_cast<int>(tasks.size()), cfg.threads, [&](int idx) {
                const Task& task = tasks[idx];
                const Track& t = tracks[pairs[task.pair].first];
                const Detection& d = dets[pairs[task.pair].second];
                if (t.recent_appearance.empty())
                    throw EmptyTrackAppearance("track " + std::to_string(t.id) +
                                               " has no recent appearance");
                const bool is_recent = task.slot == static_cast<int>(t.cue.size());
                const AppearanceDescriptor& tmpl =
                    is_recent ? t.recent_appearance : t.cue.entries[task.slot].descriptor;
                const BoundingBox& tmpl_box =
                    is_recent ? t.recent_box : t.cue.entries[task.slot].box;
                const Eigen::VectorXd fm = model.provider->feature(tmpl, d.descriptor);
                if (fm.size() != model.provider->dimension())
                    throw DimensionMismatch("provider returned a feature of unexpected size");
                Eigen::VectorXd f(model.weights->d_in);
                f << fm, relative_shape_difference(tmpl_box, d.box);
                cell_inputs[idx] = std::move(f);
            });
            // stage two: all sequence associations
            parallel_for(n_pairs, cfg.threads, [&](int p) {
                const Track& t = tracks[pairs[p].first];
                std::vector<Eigen::VectorXd> seq(
                    cell_inputs.begin() + first_task[p],
                    cell_inputs.begin() + first_task[p] + static_cast<int>(t.cue.size()) + 1);
                appearance[p] = deep_tama_from_inputs(std::move(seq), *model.weights);
            });
            break;
        }
        case LikelihoodMode::baseline_linear:
        case LikelihoodMode::baseline_select: {
            parallel_for(n_pairs, cfg.threads, [&](int p) {
                appearance[p] =
                    baseline_appearance(tracks[pairs[p].first], dets[pairs[p].second],
                                        *model.scorer);
            });
            break;
        }
        case LikelihoodMode::iou_only:
            break;  // handled above
    }

    for (int p = 0; p < n_pairs; ++p) {
        const auto [i, j] = pairs[p];
        const double base = cfg.likelihood_mode == LikelihoodMode::deep_tama ? gate.motion(i, j)
                                                                             : gate.geo(i, j);
        sim.values(i, j) = base * appearance[p];
        sim.valid(i, j) = true;
    }
    return sim;
}

SimilarityMatrix build_similarity_naive(const std::vector<Track>& tracks,
                                        const std::vector<Detection>& dets,
                                        const TrackerConfig& cfg, const AppearanceModel& model) {
    const int n = static_cast<int>(tracks.size());
    const int m = static_cast<int>(dets.size());
    if (cfg.likelihood_mode == LikelihoodMode::iou_only) {
        SimilarityMatrix sim = similarity_shell(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                sim.values(i, j) = iou(tracks[i].box(), dets[j].box);
                sim.valid(i, j) = true;
            }
        return sim;
    }

    SimilarityMatrix sim = similarity_shell(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double pm = motion_likelihood(tracks[i], dets[j], cfg.geometry);
            const double ps = shape_likelihood(tracks[i].box(), dets[j].box, cfg.geometry);
            if (pm * ps <= cfg.tau_match) continue;
            double pa = 0.0;
            switch (cfg.likelihood_mode) {
                case LikelihoodMode::ctama:
                    pa = ctama_likelihood(tracks[i], dets[j], *model.scorer, cfg);
                    break;
                case LikelihoodMode::deep_tama:
                    pa = deep_tama_likelihood(tracks[i], dets[j], *model.provider,
                                              *model.weights, cfg);
                    break;
                case LikelihoodMode::baseline_linear:
                case LikelihoodMode::baseline_select:
                    pa = baseline_appearance(tracks[i], dets[j], *model.scorer);
                    break;
                case LikelihoodMode::iou_only:
                    break;
            }
            const double base =
                cfg.likelihood_mode == LikelihoodMode::deep_tama ? pm : pm * ps;
            sim.values(i, j) = base * pa;
            sim.valid(i, j) = true;
        }
    }
    return sim;
}

}  // namespace tamatrack
