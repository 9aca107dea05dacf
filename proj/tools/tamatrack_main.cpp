#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

#include "tamatrack/appearance.hpp"
#include "tamatrack/engine.hpp"
#include "tamatrack/eval.hpp"
#include "tamatrack/io.hpp"
#include "tamatrack/tama.hpp"

namespace tt = tamatrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMalformedInput = 2;
constexpr int kExitRuntime = 3;

struct TrackArgs {
    std::string det_path;
    std::string config_path;
    std::string mode;
    std::string scorer = "histogram";
    std::string init;
    std::string weights_path;
    std::string features_path;
    std::string patches_dir;
    std::string out_path;
    std::string frames = "all";
    int threads = 0;
};

int run_track(const TrackArgs& args) {
    tt::TrackerConfig cfg;
    if (!args.config_path.empty()) cfg = tt::load_config(args.config_path);
    if (!args.mode.empty()) cfg.likelihood_mode = tt::parse_likelihood_mode(args.mode);
    if (!args.init.empty()) cfg.init_mode = tt::parse_init_mode(args.init);
    if (args.threads > 0) cfg.threads = args.threads;
    cfg = tt::validate_config(cfg);

    auto dets = tt::parse_detections(args.det_path);
    for (auto& [frame, frame_dets] : dets)
        frame_dets = tt::nms(std::move(frame_dets), cfg.nms_iou, cfg.nms_conf_min);

    const bool needs_appearance = cfg.likelihood_mode != tt::LikelihoodMode::iou_only;
    tt::FeatureLookup lookup;
    if (needs_appearance) {
        if (args.scorer == "histogram") {
            if (!args.patches_dir.empty()) {
                tt::attach_patches(dets, args.patches_dir);
            } else if (!args.features_path.empty()) {
                lookup = tt::parse_feature_file(args.features_path);
                tt::attach_features(dets, lookup, false);
            } else {
                std::cerr << "scorer histogram needs --patches or --features\n";
                return kExitUsage;
            }
        } else if (args.scorer == "embedding" || args.scorer == "file") {
            if (args.features_path.empty()) {
                std::cerr << "scorer " << args.scorer << " needs --features\n";
                return kExitUsage;
            }
            lookup = tt::parse_feature_file(args.features_path);
            tt::attach_features(dets, lookup, false);
        } else if (args.scorer == "oracle") {
            if (args.features_path.empty()) {
                std::cerr << "scorer oracle needs --features with one-dimensional tag rows\n";
                return kExitUsage;
            }
            lookup = tt::parse_feature_file(args.features_path);
            tt::attach_features(dets, lookup, true);
        } else {
            std::cerr << "unknown scorer: " << args.scorer << "\n";
            return kExitUsage;
        }
    }

    std::unique_ptr<tt::PairScorer> scorer;
    if (args.scorer == "histogram")
        scorer = std::make_unique<tt::HistogramScorer>();
    else if (args.scorer == "embedding" || args.scorer == "file")
        scorer = std::make_unique<tt::EmbeddingScorer>();
    else
        scorer = std::make_unique<tt::OracleScorer>(cfg.oracle_same, cfg.oracle_diff);

    tt::LstmWeights weights;
    std::unique_ptr<tt::PairFeatureProvider> provider;
    tt::AppearanceModel model;
    model.scorer = scorer.get();
    model.lambda_f = cfg.lambda_f_for_vectors(args.scorer == "histogram");

    if (cfg.likelihood_mode == tt::LikelihoodMode::deep_tama) {
        if (args.weights_path.empty()) {
            std::cerr << "mode deep_tama needs --weights\n";
            return kExitUsage;
        }
        weights = tt::load_lstm_weights(args.weights_path);
        if ((weights.d_in - 8) % 3 != 0)
            throw tt::DimensionMismatch("weight input dimension cannot host a pair feature");
        provider = std::make_unique<tt::SyntheticPairFeatureProvider>((weights.d_in - 8) / 3);
        model.provider = provider.get();
        model.weights = &weights;
    }

    std::vector<int> frames;
    if (!dets.empty()) {
        if (args.frames == "present") {
            for (const auto& [f, _] : dets) frames.push_back(f);
        } else {
            for (int f = 1; f <= dets.rbegin()->first; ++f) frames.push_back(f);
        }
    }
    const auto rows = tt::run_sequence(dets, frames, cfg, model);
    tt::write_results(rows, args.out_path);
    std::cout << "wrote " << rows.size() << " rows to " << args.out_path << "\n";
    return kExitOk;
}

int run_eval(const std::string& gt_path, const std::string& res_path) {
    const tt::GroundTruth gt = tt::parse_ground_truth(gt_path);
    const auto results = tt::parse_results(res_path);
    const tt::ClearMotResult m = tt::clear_mot(gt, results);
    const double id_f1 = tt::idf1(gt, results);
    std::printf("MOTA %.6f\n", m.mota);
    std::printf("MOTP %.6f\n", m.motp);
    std::printf("IDF1 %.6f\n", id_f1);
    std::printf("FP %d\n", m.fp);
    std::printf("FN %d\n", m.fn);
    std::printf("IDSW %d\n", m.idsw);
    std::printf("FM %d\n", m.fm);
    std::printf("MT %d\n", m.mt);
    std::printf("ML %d\n", m.ml);
    std::printf("GT %d\n", m.gt_count);
    std::printf("TP %d\n", m.tp);
    return kExitOk;
}

int run_synth(const std::string& spec_path, long seed, const std::string& prefix) {
    tt::ScenarioSpec spec = tt::parse_scenario_spec(spec_path);
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    const tt::Scenario scenario = tt::generate_scenario(spec);

    tt::write_detections(scenario.detections, prefix + "_det.txt");
    tt::write_ground_truth(scenario.gt, prefix + "_gt.txt");

    tt::FeatureLookup features;
    features.dim = 48;
    tt::FeatureLookup tags;
    tags.dim = 1;
    for (const auto& [frame, dets] : scenario.detections) {
        for (const tt::Detection& d : dets) {
            features.values[{frame, d.index}] = d.descriptor.vector();
            Eigen::VectorXd tag(1);
            tag(0) = static_cast<double>(scenario.tags.at({frame, d.index}));
            tags.values[{frame, d.index}] = tag;
        }
    }
    tt::write_feature_file(features, prefix + "_features.txt");
    tt::write_feature_file(tags, prefix + "_tags.txt");
    std::cout << "wrote " << prefix << "_det.txt, " << prefix << "_gt.txt, " << prefix
              << "_features.txt, " << prefix << "_tags.txt\n";
    return kExitOk;
}

int run_decimate(const std::string& in_path, int fps_orig, int fps_new,
                 const std::string& out_path) {
    const auto rows = tt::parse_mot_rows(in_path);
    const int stride = tt::decimation_stride(fps_orig, fps_new);
    std::vector<tt::MotRow> kept;
    for (const tt::MotRow& r : rows)
        if ((r.frame - 1) % stride == 0) kept.push_back(r);
    if (out_path.empty()) {
        for (const tt::MotRow& r : kept) std::cout << tt::mot_row_line(r) << "\n";
    } else {
        tt::write_mot_rows(kept, out_path);
        std::cout << "kept " << kept.size() << " of " << rows.size() << " rows in " << out_path
                  << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online multi-pedestrian tracking with temporal appearance matching"};
    app.require_subcommand(1);

    TrackArgs track_args;
    CLI::App* track = app.add_subcommand("track", "run the tracker on a detection file");
    track->add_option("--det", track_args.det_path, "detection file (MOT rows)")->required();
    track->add_option("--config", track_args.config_path, "key = value configuration file");
    track->add_option("--mode", track_args.mode,
                      "ctama|deep_tama|baseline_linear|baseline_select|iou_only");
    track->add_option("--scorer", track_args.scorer, "histogram|embedding|oracle|file");
    track->add_option("--init", track_args.init, "hierarchical|iou|distance");
    track->add_option("--weights", track_args.weights_path, "LSTM weight file (deep_tama)");
    track->add_option("--features", track_args.features_path,
                      "per-detection feature file (tags for the oracle scorer)");
    track->add_option("--patches", track_args.patches_dir,
                      "directory of <frame>_<index>.ppm patches");
    track->add_option("--out", track_args.out_path, "result file")->required();
    track->add_option("--frames", track_args.frames,
                      "all: step every frame up to the last; present: only frames in the file");
    track->add_option("--threads", track_args.threads, "similarity scoring threads");

    std::string gt_path, res_path;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a result file against ground truth");
    eval_cmd->add_option("--gt", gt_path, "ground truth file (MOT rows)")->required();
    eval_cmd->add_option("--res", res_path, "result file (MOT rows)")->required();

    std::string spec_path, out_prefix;
    long synth_seed = -1;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scenario");
    synth->add_option("--spec", spec_path, "scenario spec (json)")->required();
    synth->add_option("--seed", synth_seed, "override the scenario file's seed");
    synth->add_option("--out-prefix", out_prefix, "output file prefix")->required();

    std::string dec_in, dec_out;
    int fps_orig = 0, fps_new = 0;
    CLI::App* dec = app.add_subcommand("decimate", "reduce a file to a lower fixed frame rate");
    dec->add_option("--in", dec_in, "input file (MOT rows)")->required();
    dec->add_option("--fps-orig", fps_orig, "original frame rate")->required();
    dec->add_option("--fps-new", fps_new, "new frame rate (must divide the original)")
        ->required();
    dec->add_option("--out", dec_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (track->parsed()) return run_track(track_args);
        if (eval_cmd->parsed()) return run_eval(gt_path, res_path);
        if (synth->parsed()) return run_synth(spec_path, synth_seed, out_prefix);
        if (dec->parsed()) return run_decimate(dec_in, fps_orig, fps_new, dec_out);
    } catch (const tt::MalformedRow& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::MalformedWeightFile& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::DuplicateKey& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::DimensionMismatch& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::NonIntegerStride& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const tt::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
