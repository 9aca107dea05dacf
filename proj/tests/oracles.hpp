#pragma once

// Independent reference implementations used to freeze expected values. These
// deliberately avoid the library's linear-algebra paths: plain loops, scalar
// math, exhaustive enumeration.

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "tamatrack/tama.hpp"

namespace oracles {

struct ScalarState {
    std::vector<double> c;
    std::vector<double> h;
};

/// Element-by-element gate arithmetic over the same weight values; no matrix
/// library involved.
ScalarState lstm_forward_scalar(const tamatrack::LstmWeights& w,
                                const std::vector<std::vector<double>>& inputs);

/// Scalar softmax-positive of the projected last hidden state, with head
/// padding applied by plain loops.
double deep_tama_scalar(const tamatrack::LstmWeights& w,
                        const std::vector<std::vector<double>>& real_inputs);

/// Exhaustive minimum over all one-to-one assignments of min(n, m) pairs.
double min_cost_enumeration(const Eigen::MatrixXd& cost,
                            std::vector<std::pair<int, int>>* best_pairs = nullptr);

/// Random symmetric positive-definite 4x4 matrix.
Eigen::Matrix4d random_spd4(std::uint64_t seed);

}  // namespace oracles
