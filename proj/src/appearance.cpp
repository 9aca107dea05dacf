#include "tamatrack/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tamatrack {

namespace {

// hexcone RGB -> HSV with all components scaled to [0,1); hue wraps.
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    v = mx;
    s = mx > 0.0 ? delta / mx : 0.0;
    if (delta <= 0.0) {
        h = 0.0;
        return;
    }
    double hue;
    if (mx == r)
        hue = std::fmod((g - b) / delta, 6.0);
    else if (mx == g)
        hue = (b - r) / delta + 2.0;
    else
        hue = (r - g) / delta + 4.0;
    hue /= 6.0;
    if (hue < 0.0) hue += 1.0;
    h = hue;
}

int bin_of(double value) {
    int k = static_cast<int>(std::floor(value * 8.0));
    return std::min(7, std::max(0, k));
}

}  // namespace

ColorHistogram extract_histogram(const Patch& patch) {
    Eigen::VectorXd bins = Eigen::VectorXd::Zero(48);
    for (int y = 0; y < Patch::kHeight; ++y) {
        for (int x = 0; x < Patch::kWidth; ++x) {
            const double r = patch.at(y, x, 0);
            const double g = patch.at(y, x, 1);
            const double b = patch.at(y, x, 2);
            double h, s, v;
            rgb_to_hsv(r, g, b, h, s, v);
            bins(0 + bin_of(h)) += 1.0;
            bins(8 + bin_of(s)) += 1.0;
            bins(16 + bin_of(v)) += 1.0;
            bins(24 + bin_of(r)) += 1.0;
            bins(32 + bin_of(g)) += 1.0;
            bins(40 + bin_of(b)) += 1.0;
        }
    }
    const double norm = bins.norm();
    if (norm > 0.0) bins /= norm;
    return ColorHistogram{std::move(bins)};
}

double histogram_score(const ColorHistogram& a, const ColorHistogram& b) {
    if (a.bins.size() != b.bins.size())
        throw DimensionMismatch("histogram sizes differ");
    const double inner = std::max(0.0, a.bins.dot(b.bins));
    return std::sqrt(std::min(1.0, inner));
}

double embedding_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("embedding dimensions differ: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
    return std::exp(-(a - b).squaredNorm());
}

Eigen::VectorXd tag_signature(std::int64_t tag, int dim) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(tag));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = std::abs(gauss(rng));
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

Eigen::VectorXd synthetic_pair_feature(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("pair feature inputs differ: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
    const int n = static_cast<int>(a.size());
    Eigen::VectorXd out(3 * n + 6);
    const Eigen::VectorXd diff = a - b;
    out.segment(0, n) = diff.cwiseAbs();
    out.segment(n, n) = a.cwiseProduct(b);
    out.segment(2 * n, n) = diff.cwiseAbs2();
    const double l1 = diff.lpNorm<1>();
    const double l2 = diff.norm();
    const double inner = a.dot(b);
    const double bc = a.cwiseProduct(b).cwiseMax(0.0).cwiseSqrt().sum();
    const double linf = diff.lpNorm<Eigen::Infinity>();
    const double na = a.norm();
    const double nb = b.norm();
    double cosine;
    if (na > 0.0 && nb > 0.0)
        cosine = inner / (na * nb);
    else
        cosine = (na == 0.0 && nb == 0.0) ? 1.0 : 0.0;
    out.segment(3 * n, 6) << l1, l2, inner, bc, linf, cosine;
    return out;
}

Eigen::VectorXd linear_feature_update(const Eigen::VectorXd& f_prev, const Eigen::VectorXd& f_obs,
                                      double match_likelihood, double lambda_f) {
    if (f_prev.size() != f_obs.size())
        throw DimensionMismatch("feature update inputs differ in dimension");
    const double w = match_likelihood / lambda_f;
    return (1.0 - w) * f_prev + w * f_obs;
}

Eigen::VectorXd select_feature_update(const Eigen::VectorXd& f_prev, const Eigen::VectorXd& f_obs,
                                      double match_likelihood, double tau_a) {
    return match_likelihood > tau_a ? f_obs : f_prev;
}

// Completes the descriptor type declared in core: the lazily computed,
// cached feature-space view of the payload.
const Eigen::VectorXd& AppearanceDescriptor::feature_basis() const {
    if (!data_) throw Error("feature_basis on an empty descriptor");
    if (is_none()) throw Error("feature_basis on a descriptor without appearance payload");
    std::call_once(data_->basis_once, [this] {
        const Data& d = *data_;
        if (std::holds_alternative<Patch>(d.payload)) {
            d.basis = extract_histogram(std::get<Patch>(d.payload)).bins;
        } else if (std::holds_alternative<Eigen::VectorXd>(d.payload)) {
            d.basis = std::get<Eigen::VectorXd>(d.payload);
        } else {
            d.basis = tag_signature(std::get<std::int64_t>(d.payload));
        }
    });
    return data_->basis;
}

double HistogramScorer::score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const {
    if (a.empty() || b.empty()) throw Error("histogram scorer needs non-empty descriptors");
    const ColorHistogram ha{a.feature_basis()};
    const ColorHistogram hb{b.feature_basis()};
    return histogram_score(ha, hb);
}

double EmbeddingScorer::score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const {
    if (a.empty() || b.empty()) throw Error("embedding scorer needs non-empty descriptors");
    const Eigen::VectorXd& va = a.has_vector() ? a.vector() : a.feature_basis();
    const Eigen::VectorXd& vb = b.has_vector() ? b.vector() : b.feature_basis();
    return embedding_score(va, vb);
}

double OracleScorer::score(const AppearanceDescriptor& a, const AppearanceDescriptor& b) const {
    if (!a.has_tag() || !b.has_tag())
        throw UntaggedDescriptor("oracle scorer needs tagged descriptors");
    const std::int64_t ta = a.tag();
    const std::int64_t tb = b.tag();
    double s = ta == tb ? s_same_ : s_diff_;
    if (noise_ > 0.0) {
        // order-independent per-pair perturbation so scoring stays symmetric
        // and reproducible across batch layouts
        const std::uint64_t lo = static_cast<std::uint64_t>(std::min(ta, tb));
        const std::uint64_t hi = static_cast<std::uint64_t>(std::max(ta, tb));
        std::uint64_t k = lo * 0x9e3779b97f4a7c15ULL ^ (hi + 0xbf58476d1ce4e5b9ULL);
        k ^= k >> 30;
        k *= 0xbf58476d1ce4e5b9ULL;
        k ^= k >> 27;
        const double u = static_cast<double>(k % 2000001) / 1000000.0 - 1.0;  // in [-1,1]
        s += noise_ * u;
    }
    return clamp01(s);
}

Eigen::VectorXd SyntheticPairFeatureProvider::feature(const AppearanceDescriptor& a,
                                                      const AppearanceDescriptor& b) const {
    if (a.empty() || b.empty()) throw Error("pair feature provider needs non-empty descriptors");
    const Eigen::VectorXd& va = a.feature_basis();
    const Eigen::VectorXd& vb = b.feature_basis();
    if (va.size() != basis_dim_ || vb.size() != basis_dim_)
        throw DimensionMismatch("pair feature basis must have dimension " +
                                std::to_string(basis_dim_));
    return synthetic_pair_feature(va, vb);
}

}  // namespace tamatrack
