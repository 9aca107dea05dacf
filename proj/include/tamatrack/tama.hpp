#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tamatrack/appearance.hpp"
#include "tamatrack/core.hpp"

namespace tamatrack {

/// Gate and projection weights for the sequence association network. The four
/// gate matrices share the shape d_hidden x (d_hidden + d_in); the equations
/// carry no bias terms, but an optional bias block (zero by default) is kept
/// for externally trained weights.
struct LstmWeights {
    int d_hidden = 128;
    int d_in = 152;  // matching-feature dimension + 2 shape entries
    int n_cells = 15;

    Eigen::MatrixXd w_f, w_i, w_o, w_c;
    Eigen::VectorXd w_pos, w_neg;

    bool has_bias = false;
    Eigen::VectorXd b_f, b_i, b_o, b_c;
    double b_pos = 0.0;
    double b_neg = 0.0;

    static LstmWeights zeros(int hidden = 128, int input = 152, int cells = 15);
    /// Gaussian weights with the given scale; deterministic per seed.
    static LstmWeights random(std::uint64_t seed, int hidden = 128, int input = 152,
                              int cells = 15, double scale = 0.1);
    void check_dimensions() const;  // throws DimensionMismatch
};

struct LstmState {
    Eigen::VectorXd c;  // cell state
    Eigen::VectorXd h;  // hidden state

    static LstmState zero(int d_hidden) {
        return LstmState{Eigen::VectorXd::Zero(d_hidden), Eigen::VectorXd::Zero(d_hidden)};
    }
};

/// One gate step: sigmoid/tanh projections of [h_prev, f_in], then
/// c = f.*c_prev + i.*c~ and h = o.*tanh(c).
LstmState lstm_cell(const Eigen::VectorXd& f_in, const LstmState& prev, const LstmWeights& w);

/// Runs lstm_cell over the inputs from a zero initial state. Inputs must
/// already have length n_cells (use pad_head first for shorter sequences).
LstmState lstm_forward(const std::vector<Eigen::VectorXd>& inputs, const LstmWeights& w);

/// Left-pads with zero vectors so real inputs terminate at the final cell.
std::vector<Eigen::VectorXd> pad_head(std::vector<Eigen::VectorXd> inputs, int n_cells, int d_in);

/// Signed per-axis shape difference of a template box against an observation,
/// divided by the observation's extent: [(w_t - w_z)/w_z, (h_t - h_z)/h_z].
Eigen::Vector2d relative_shape_difference(const BoundingBox& template_box,
                                          const BoundingBox& observation_box);

/// Combination coefficients of the confidence-weighted association: first the
/// recent-appearance coefficient c_rcnt/lambda_c, then one coefficient per cue
/// entry. Non-negative, summing to exactly 1 (empty cue collapses onto the
/// first coefficient).
std::vector<double> ctama_coefficients(double c_rcnt, double lambda_c,
                                       const std::vector<double>& cue_confidences);

/// Applies the coefficients to the pairwise scores.
double ctama_combine(double c_rcnt, double lambda_c, double recent_score,
                     const std::vector<double>& cue_confidences,
                     const std::vector<double>& cue_scores);

/// Confidence-weighted combination of the observation's pairwise scores
/// against the recent appearance and every cue template.
double ctama_likelihood(const Track& track, const Detection& obs, const PairScorer& scorer,
                        const TrackerConfig& cfg);

/// Softmax-positive output of the gate network run over the per-template
/// matching features (oldest first) with the recent appearance in the final
/// cell; head-padded with zeros to n_cells.
double deep_tama_likelihood(const Track& track, const Detection& obs,
                            const PairFeatureProvider& provider, const LstmWeights& w,
                            const TrackerConfig& cfg);

/// Per-cell inputs for the sequence, before padding: one per cue entry plus
/// the recent-appearance cell last. Exposed so batched scoring can assemble
/// the exact same sequence.
std::vector<Eigen::VectorXd> deep_tama_inputs(const Track& track, const Detection& obs,
                                              const PairFeatureProvider& provider,
                                              const LstmWeights& w);

/// Padded forward pass + softmax over (w_pos, w_neg) projections of the last
/// hidden state; returns the positive component.
double deep_tama_from_inputs(std::vector<Eigen::VectorXd> real_inputs, const LstmWeights& w);

LstmWeights load_lstm_weights(const std::string& path);
void save_lstm_weights(const LstmWeights& w, const std::string& path);

}  // namespace tamatrack
