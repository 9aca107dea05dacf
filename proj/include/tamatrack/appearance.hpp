#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

#include "tamatrack/core.hpp"

namespace tamatrack {

/// 48 non-negative bins (8 per channel over H, S, V, R, G, B), L2-normalized
/// as a whole; an all-zero vector only for a constant-zero patch.
struct ColorHistogram {
    Eigen::VectorXd bins;  // size 48
};

ColorHistogram extract_histogram(const Patch& patch);

/// sqrt of the inner product of two L2-normalized non-negative histograms.
double histogram_score(const ColorHistogram& a, const ColorHistogram& b);

/// exp(-||a - b||^2); throws DimensionMismatch on unequal dimensions.
double embedding_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Deterministic non-negative unit vector derived from an identity tag;
/// stands in for a feature basis in synthetic runs.
Eigen::VectorXd tag_signature(std::int64_t tag, int dim = 48);

/// Symmetric pair feature built from two equal-dimension non-negative bases:
/// [|a-b|, a.*b, (a-b).^2, stats] where stats = (L1, L2, <a,b>,
/// sum sqrt(max(a_i b_i, 0)), max |a_i-b_i|, cosine). For 48-dim inputs the
/// output dimension is 150.
Eigen::VectorXd synthetic_pair_feature(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// (1 - p/lambda_f) * f_prev + (p/lambda_f) * f_obs.
Eigen::VectorXd linear_feature_update(const Eigen::VectorXd& f_prev, const Eigen::VectorXd& f_obs,
                                      double match_likelihood, double lambda_f);

/// f_obs when match_likelihood > tau_a, f_prev otherwise.
Eigen::VectorXd select_feature_update(const Eigen::VectorXd& f_prev, const Eigen::VectorXd& f_obs,
                                      double match_likelihood, double tau_a);

/// Pairwise appearance likelihood in [0,1]. Implementations must be safely
/// callable concurrently over independent pairs.
class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const = 0;
    virtual bool symmetric() const { return true; }
};

/// Pairwise matching-feature provider of a declared fixed dimension.
class PairFeatureProvider {
public:
    virtual ~PairFeatureProvider() = default;
    virtual int dimension() const = 0;
    virtual Eigen::VectorXd feature(const AppearanceDescriptor& a,
                                    const AppearanceDescriptor& b) const = 0;
};

/// Scores sqrt(<h(a), h(b)>) over the descriptors' histogram-like bases.
class HistogramScorer : public PairScorer {
public:
    double score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const override;
};

/// Scores exp(-||v(a) - v(b)||^2) over the descriptors' vector payloads
/// (feature basis when no raw vector is stored).
class EmbeddingScorer : public PairScorer {
public:
    double score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const override;
};

/// Ground-truth-tag scorer for synthetic runs: s_same for equal tags, s_diff
/// otherwise, plus an optional deterministic per-pair perturbation.
class OracleScorer : public PairScorer {
public:
    OracleScorer(double s_same = 0.9, double s_diff = 0.1, double noise_amplitude = 0.0)
        : s_same_(s_same), s_diff_(s_diff), noise_(noise_amplitude) {}
    double score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const override;

private:
    double s_same_;
    double s_diff_;
    double noise_;
};

/// Fixed-output scorer; with value 1 the engine reduces to geometric tracking.
class ConstantScorer : public PairScorer {
public:
    explicit ConstantScorer(double value = 1.0) : value_(value) {}
    double score(const AppearanceDescriptor&, const AppearanceDescriptor&) const override {
        return value_;
    }

private:
    double value_;
};

/// Builds synthetic_pair_feature over the descriptors' feature bases; declares
/// dimension 3*basis_dim + 6 (150 for the default 48-dim basis).
class SyntheticPairFeatureProvider : public PairFeatureProvider {
public:
    explicit SyntheticPairFeatureProvider(int basis_dim = 48) : basis_dim_(basis_dim) {}
    int dimension() const override { return 3 * basis_dim_ + 6; }
    Eigen::VectorXd feature(const AppearanceDescriptor& a,
                            const AppearanceDescriptor& b) const override;

private:
    int basis_dim_;
};

}  // namespace tamatrack
