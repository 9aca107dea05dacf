#include "tamatrack/core.hpp"

#include <algorithm>
#include <cmath>

namespace tamatrack {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

AppearanceDescriptor AppearanceDescriptor::none() {
    AppearanceDescriptor d;
    d.data_ = std::make_shared<Data>();
    return d;
}

AppearanceDescriptor AppearanceDescriptor::from_patch(Patch p) {
    AppearanceDescriptor d;
    auto data = std::make_shared<Data>();
    data->payload = std::move(p);
    d.data_ = std::move(data);
    return d;
}

AppearanceDescriptor AppearanceDescriptor::from_vector(Eigen::VectorXd v) {
    AppearanceDescriptor d;
    auto data = std::make_shared<Data>();
    data->payload = std::move(v);
    d.data_ = std::move(data);
    return d;
}

AppearanceDescriptor AppearanceDescriptor::from_tag(std::int64_t tag) {
    AppearanceDescriptor d;
    auto data = std::make_shared<Data>();
    data->payload = tag;
    d.data_ = std::move(data);
    return d;
}

bool AppearanceDescriptor::is_none() const {
    return data_ && std::holds_alternative<std::monostate>(data_->payload);
}
bool AppearanceDescriptor::has_patch() const {
    return data_ && std::holds_alternative<Patch>(data_->payload);
}
bool AppearanceDescriptor::has_vector() const {
    return data_ && std::holds_alternative<Eigen::VectorXd>(data_->payload);
}
bool AppearanceDescriptor::has_tag() const {
    return data_ && std::holds_alternative<std::int64_t>(data_->payload);
}

const Patch& AppearanceDescriptor::patch() const {
    if (!has_patch()) throw Error("descriptor holds no patch");
    return std::get<Patch>(data_->payload);
}

const Eigen::VectorXd& AppearanceDescriptor::vector() const {
    if (!has_vector()) throw Error("descriptor holds no vector");
    return std::get<Eigen::VectorXd>(data_->payload);
}

std::int64_t AppearanceDescriptor::tag() const {
    if (!has_tag()) throw UntaggedDescriptor("descriptor holds no identity tag");
    return std::get<std::int64_t>(data_->payload);
}

Detection::Detection(int frame_, int index_, BoundingBox box_, double raw_conf,
                     AppearanceDescriptor desc)
    : frame(frame_),
      index(index_),
      box(box_),
      confidence(clamp01(raw_conf)),
      raw_confidence(raw_conf),
      descriptor(std::move(desc)) {
    if (frame_ < 1) throw Error("Detection: frame index must be >= 1");
}

LikelihoodMode parse_likelihood_mode(const std::string& s) {
    if (s == "ctama") return LikelihoodMode::ctama;
    if (s == "deep_tama") return LikelihoodMode::deep_tama;
    if (s == "baseline_linear") return LikelihoodMode::baseline_linear;
    if (s == "baseline_select") return LikelihoodMode::baseline_select;
    if (s == "iou_only") return LikelihoodMode::iou_only;
    throw Error("unknown likelihood mode: " + s);
}

std::string to_string(LikelihoodMode m) {
    switch (m) {
        case LikelihoodMode::ctama: return "ctama";
        case LikelihoodMode::deep_tama: return "deep_tama";
        case LikelihoodMode::baseline_linear: return "baseline_linear";
        case LikelihoodMode::baseline_select: return "baseline_select";
        case LikelihoodMode::iou_only: return "iou_only";
    }
    return "?";
}

InitMode parse_init_mode(const std::string& s) {
    if (s == "hierarchical") return InitMode::hierarchical;
    if (s == "iou") return InitMode::iou;
    if (s == "distance") return InitMode::distance;
    throw Error("unknown init mode: " + s);
}

std::string to_string(InitMode m) {
    switch (m) {
        case InitMode::hierarchical: return "hierarchical";
        case InitMode::iou: return "iou";
        case InitMode::distance: return "distance";
    }
    return "?";
}

int TrackerConfig::termination_misses() const {
    return static_cast<int>(std::lround(fps * beta_term));
}

int TrackerConfig::cue_min_interval() const {
    return static_cast<int>(std::lround(fps * beta_intv));
}

namespace {

void require(bool ok, const char* name, const std::string& msg) {
    if (!ok) throw ConfigError(name, msg);
}

}  // namespace

TrackerConfig validate_config(const TrackerConfig& cfg) {
    require(cfg.tau_cue >= 1, "NonPositiveCueLimit", "tau_cue must be >= 1");
    require(cfg.lambda_c >= 1.0, "LambdaBelowOne", "lambda_c must be >= 1");
    require(cfg.lambda_f_histogram >= 1.0, "LambdaBelowOne", "lambda_f_histogram must be >= 1");
    require(cfg.lambda_f_embedding >= 1.0, "LambdaBelowOne", "lambda_f_embedding must be >= 1");
    require(cfg.fps >= 1, "NonPositiveFps", "fps must be >= 1");
    require(cfg.beta_age > 0.0, "NonPositiveAgeBound", "beta_age must be > 0");
    require(cfg.beta_intv >= 0.0, "NegativeIntervalBound", "beta_intv must be >= 0");
    require(cfg.beta_term > 0.0, "NonPositiveTerminationBound", "beta_term must be > 0");
    require(cfg.beta_dist > 0.0, "NonPositiveDistanceBound", "beta_dist must be > 0");
    require(cfg.tau_init >= 1, "NonPositiveInitDepth", "tau_init must be >= 1");
    require(cfg.tau_hist >= 0.0 && cfg.tau_hist <= 1.0, "CueThresholdOutOfRange",
            "tau_hist must lie in [0,1]");
    require(cfg.tau_iou >= 0.0 && cfg.tau_iou <= 1.0, "IouThresholdOutOfRange",
            "tau_iou must lie in [0,1]");
    require(cfg.tau_match >= 0.0 && cfg.tau_match <= 1.0, "MatchThresholdOutOfRange",
            "tau_match must lie in [0,1]");
    require(cfg.tau_shp > 0.0 && cfg.tau_shp <= 1.0, "ShapeThresholdOutOfRange",
            "tau_shp must lie in (0,1]");
    require(cfg.tau_a >= 0.0 && cfg.tau_a <= 1.0, "SubstitutionThresholdOutOfRange",
            "tau_a must lie in [0,1]");
    require(cfg.oracle_same >= 0.0 && cfg.oracle_same <= 1.0, "OracleScoreOutOfRange",
            "oracle_same must lie in [0,1]");
    require(cfg.oracle_diff >= 0.0 && cfg.oracle_diff <= 1.0, "OracleScoreOutOfRange",
            "oracle_diff must lie in [0,1]");
    require(cfg.nms_conf_min >= 0.0, "NegativeConfidenceFloor", "nms_conf_min must be >= 0");
    require(cfg.threads >= 1, "NonPositiveThreadCount", "threads must be >= 1");

    const GeometryParams& g = cfg.geometry;
    require(g.eta > 0.0, "NonPositiveMotionSharpness", "eta must be > 0");
    require(g.xi > 0.0, "NonPositiveShapeSharpness", "xi must be > 0");
    require(g.gamma_shape > 0.0 && g.gamma_shape <= 1.0, "ShapeSmoothingOutOfRange",
            "gamma_shape must lie in (0,1]");
    require(std::abs(g.sigma(0, 1) - g.sigma(1, 0)) <= 1e-12, "AsymmetricSigma",
            "sigma must be symmetric");
    // positive definiteness of a symmetric 2x2: positive diagonal and determinant
    require(g.sigma(0, 0) > 0.0 && g.sigma.determinant() > 0.0, "NonPositiveDefiniteSigma",
            "sigma must be positive definite");
    require(g.kalman.q_pos > 0.0 && g.kalman.q_vel > 0.0 && g.kalman.r_meas > 0.0 &&
                g.kalman.p0_pos > 0.0 && g.kalman.p0_vel > 0.0,
            "NonPositiveKalmanNoise", "all Kalman noise terms must be > 0");

    return cfg;
}

}  // namespace tamatrack
