#pragma once

#include <Eigen/Dense>
#include <set>
#include <utility>
#include <vector>

#include "tamatrack/appearance.hpp"
#include "tamatrack/core.hpp"
#include "tamatrack/tama.hpp"

namespace tamatrack {

/// Gated track x detection likelihoods. Entries of gated-out pairs are
/// exactly zero and excluded from the validity mask.
struct SimilarityMatrix {
    Eigen::MatrixXd values;  // N_tracks x N_dets, entries in [0,1]
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }
};

/// One-to-one (row, column) pairs, each index used at most once, sorted by
/// row index.
struct Assignment {
    std::vector<std::pair<int, int>> pairs;
};

/// Appearance backend for similarity construction: a pairwise scorer for the
/// weighted-combination and baseline modes, or a feature provider plus gate
/// weights for the sequence-association mode.
struct AppearanceModel {
    const PairScorer* scorer = nullptr;
    const PairFeatureProvider* provider = nullptr;
    const LstmWeights* weights = nullptr;
    double lambda_f = 2.0;  // linear-update control for the active scorer
};

/// Minimum-cost one-to-one assignment of min(N, M) pairs. Rectangular inputs
/// are padded internally with zero-cost dummies that are stripped from the
/// result. Equal-cost solutions are normalized toward the lowest
/// (row, column) lexicographic pair order.
Assignment hungarian(const Eigen::MatrixXd& cost);

/// Builds the gated similarity matrix using the two-stage batch plan: all
/// surviving pairwise scores (or matching features) first, then all sequence
/// associations. Identical arithmetic to the naive per-pair path.
SimilarityMatrix build_similarity(const std::vector<Track>& tracks,
                                  const std::vector<Detection>& dets, const TrackerConfig& cfg,
                                  const AppearanceModel& model);

/// Reference pair-by-pair construction; used to check the batched plan.
SimilarityMatrix build_similarity_naive(const std::vector<Track>& tracks,
                                        const std::vector<Detection>& dets,
                                        const TrackerConfig& cfg, const AppearanceModel& model);

/// Strips assigned pairs whose likelihood does not exceed tau_match and
/// reports their tracks, together with wholly unassigned tracks, as missed.
std::pair<Assignment, std::set<int>> validate_matches(const Assignment& assign,
                                                      const SimilarityMatrix& sim,
                                                      double tau_match);

}  // namespace tamatrack
