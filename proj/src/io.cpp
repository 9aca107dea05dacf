#include "tamatrack/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tamatrack/numio.hpp"

namespace tamatrack {

namespace {

std::vector<std::string_view> split_char(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

}  // namespace

std::vector<MotRow> parse_mot_rows(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<MotRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_char(line, ',');
        if (fields.size() != 10)
            throw MalformedRow(line_no, "expected 10 comma-separated fields, found " +
                                            std::to_string(fields.size()));
        bool ok = true;
        auto num = [&](int i) {
            bool field_ok = false;
            const double v = parse_double(trim(fields[i]), field_ok);
            ok = ok && field_ok;
            return v;
        };
        MotRow r;
        const double frame = num(0);
        const double id = num(1);
        r.bb_left = num(2);
        r.bb_top = num(3);
        r.bb_width = num(4);
        r.bb_height = num(5);
        r.conf = num(6);
        r.x = num(7);
        r.y = num(8);
        r.z = num(9);
        if (!ok) throw MalformedRow(line_no, "unparseable numeric field");
        if (frame != std::floor(frame) || id != std::floor(id))
            throw MalformedRow(line_no, "frame and id must be integers");
        r.frame = static_cast<int>(frame);
        r.id = static_cast<int>(id);
        if (r.frame < 1) throw MalformedRow(line_no, "frame index must be >= 1");
        if (!(r.bb_width > 0.0) || !(r.bb_height > 0.0))
            throw MalformedRow(line_no, "box width and height must be positive");
        rows.push_back(r);
    }
    return rows;
}

std::string mot_row_line(const MotRow& r) {
    std::string out = std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.id);
    for (double v : {r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, r.x, r.y, r.z}) {
        out += ',';
        out += format_double(v);
    }
    return out;
}

void write_mot_rows(const std::vector<MotRow>& rows, const std::string& path) {
    std::ofstream out = open_output(path);
    for (const MotRow& r : rows) out << mot_row_line(r) << '\n';
    if (!out) throw IoError("write failure: " + path);
}

std::map<int, std::vector<Detection>> parse_detections(const std::string& path) {
    std::map<int, std::vector<Detection>> out;
    for (const MotRow& r : parse_mot_rows(path)) {
        std::vector<Detection>& frame_dets = out[r.frame];
        frame_dets.emplace_back(r.frame, static_cast<int>(frame_dets.size()),
                                BoundingBox(r.bb_left, r.bb_top, r.bb_width, r.bb_height), r.conf,
                                AppearanceDescriptor::none());
    }
    return out;
}

std::vector<ResultRow> to_results(const std::vector<MotRow>& rows) {
    std::vector<ResultRow> out;
    out.reserve(rows.size());
    for (const MotRow& r : rows)
        out.push_back(ResultRow{r.frame, r.id,
                                BoundingBox(r.bb_left, r.bb_top, r.bb_width, r.bb_height)});
    return out;
}

GroundTruth to_ground_truth(const std::vector<MotRow>& rows) {
    GroundTruth gt;
    gt.rows.reserve(rows.size());
    for (const MotRow& r : rows)
        gt.rows.push_back(GtRow{r.frame, r.id,
                                BoundingBox(r.bb_left, r.bb_top, r.bb_width, r.bb_height)});
    return gt;
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
    std::vector<ResultRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        return a.id < b.id;
    });
    std::vector<MotRow> mot;
    mot.reserve(sorted.size());
    for (const ResultRow& r : sorted) {
        MotRow m;
        m.frame = r.frame;
        m.id = r.id;
        m.bb_left = r.box.left;
        m.bb_top = r.box.top;
        m.bb_width = r.box.width;
        m.bb_height = r.box.height;
        m.conf = 1.0;
        mot.push_back(m);
    }
    write_mot_rows(mot, path);
}

std::vector<ResultRow> parse_results(const std::string& path) {
    return to_results(parse_mot_rows(path));
}

GroundTruth parse_ground_truth(const std::string& path) {
    return to_ground_truth(parse_mot_rows(path));
}

void write_ground_truth(const GroundTruth& gt, const std::string& path) {
    std::vector<MotRow> mot;
    mot.reserve(gt.rows.size());
    for (const GtRow& r : gt.rows) {
        MotRow m;
        m.frame = r.frame;
        m.id = r.identity;
        m.bb_left = r.box.left;
        m.bb_top = r.box.top;
        m.bb_width = r.box.width;
        m.bb_height = r.box.height;
        m.conf = 1.0;
        mot.push_back(m);
    }
    write_mot_rows(mot, path);
}

void write_detections(const std::map<int, std::vector<Detection>>& dets,
                      const std::string& path) {
    std::vector<MotRow> mot;
    for (const auto& [frame, frame_dets] : dets) {
        for (const Detection& d : frame_dets) {
            MotRow m;
            m.frame = frame;
            m.id = -1;
            m.bb_left = d.box.left;
            m.bb_top = d.box.top;
            m.bb_width = d.box.width;
            m.bb_height = d.box.height;
            m.conf = d.raw_confidence;
            mot.push_back(m);
        }
    }
    write_mot_rows(mot, path);
}

FeatureLookup parse_feature_file(const std::string& path) {
    std::ifstream in = open_input(path);
    FeatureLookup lookup;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_char(line, ',');
        if (fields.size() < 3) throw MalformedRow(line_no, "expected frame,det_index,dim,...");
        bool ok1 = false, ok2 = false, ok3 = false;
        const long frame = parse_long(trim(fields[0]), ok1);
        const long index = parse_long(trim(fields[1]), ok2);
        const long dim = parse_long(trim(fields[2]), ok3);
        if (!ok1 || !ok2 || !ok3 || frame < 1 || index < 0 || dim < 1)
            throw MalformedRow(line_no, "bad key fields");
        if (static_cast<long>(fields.size()) != 3 + dim)
            throw MalformedRow(line_no, "expected " + std::to_string(dim) + " values, found " +
                                            std::to_string(fields.size() - 3));
        if (lookup.dim == 0)
            lookup.dim = static_cast<int>(dim);
        else if (lookup.dim != dim)
            throw DimensionMismatch("feature file mixes dimensions " +
                                    std::to_string(lookup.dim) + " and " + std::to_string(dim) +
                                    " at line " + std::to_string(line_no));
        Eigen::VectorXd v(dim);
        for (long i = 0; i < dim; ++i) {
            bool ok = false;
            v(i) = parse_double(trim(fields[3 + i]), ok);
            if (!ok) throw MalformedRow(line_no, "bad float value");
        }
        const auto key = std::make_pair(static_cast<int>(frame), static_cast<int>(index));
        if (!lookup.values.emplace(key, std::move(v)).second)
            throw DuplicateKey(line_no, "repeated key " + std::to_string(frame) + "," +
                                            std::to_string(index));
    }
    return lookup;
}

void write_feature_file(const FeatureLookup& lookup, const std::string& path) {
    std::ofstream out = open_output(path);
    for (const auto& [key, v] : lookup.values) {
        out << key.first << ',' << key.second << ',' << v.size();
        for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
        out << '\n';
    }
    if (!out) throw IoError("write failure: " + path);
}

void attach_features(std::map<int, std::vector<Detection>>& dets, const FeatureLookup& lookup,
                     bool as_tags) {
    if (as_tags && lookup.dim != 1)
        throw DimensionMismatch("tag lookup requires one-dimensional rows, found dim " +
                                std::to_string(lookup.dim));
    for (auto& [frame, frame_dets] : dets) {
        for (Detection& d : frame_dets) {
            const auto it = lookup.values.find({frame, d.index});
            if (it == lookup.values.end())
                throw Error("no feature row for frame " + std::to_string(frame) + " det " +
                            std::to_string(d.index));
            if (as_tags)
                d.descriptor =
                    AppearanceDescriptor::from_tag(static_cast<std::int64_t>(std::llround(it->second(0))));
            else
                d.descriptor = AppearanceDescriptor::from_vector(it->second);
        }
    }
}

void attach_patches(std::map<int, std::vector<Detection>>& dets, const std::string& dir) {
    for (auto& [frame, frame_dets] : dets) {
        for (Detection& d : frame_dets) {
            const std::string path =
                dir + "/" + std::to_string(frame) + "_" + std::to_string(d.index) + ".ppm";
            d.descriptor = AppearanceDescriptor::from_patch(read_ppm(path));
        }
    }
}

namespace {

// next whitespace-delimited token, skipping '#' comments, for the PPM header
std::string ppm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

Patch read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    if (ppm_token(in) != "P6") throw IoError("not a binary P6 image: " + path);
    bool ok1 = false, ok2 = false, ok3 = false;
    const long w = parse_long(ppm_token(in), ok1);
    const long h = parse_long(ppm_token(in), ok2);
    const long maxval = parse_long(ppm_token(in), ok3);
    if (!ok1 || !ok2 || !ok3 || w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw IoError("bad image header (need positive size, maxval <= 255): " + path);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw IoError("truncated pixel data: " + path);

    Patch patch;
    const double scale = 1.0 / static_cast<double>(maxval);
    for (int y = 0; y < Patch::kHeight; ++y) {
        const double sy = (y + 0.5) * static_cast<double>(h) / Patch::kHeight - 0.5;
        const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, static_cast<int>(h) - 1);
        const int y1 = std::min(y0 + 1, static_cast<int>(h) - 1);
        const double fy = std::clamp(sy - y0, 0.0, 1.0);
        for (int x = 0; x < Patch::kWidth; ++x) {
            const double sx = (x + 0.5) * static_cast<double>(w) / Patch::kWidth - 0.5;
            const int x0 =
                std::clamp(static_cast<int>(std::floor(sx)), 0, static_cast<int>(w) - 1);
            const int x1 = std::min(x0 + 1, static_cast<int>(w) - 1);
            const double fx = std::clamp(sx - x0, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                auto px = [&](int yy, int xx) {
                    return static_cast<double>(raw[(static_cast<std::size_t>(yy) * w + xx) * 3 + c]);
                };
                const double top = px(y0, x0) * (1 - fx) + px(y0, x1) * fx;
                const double bot = px(y1, x0) * (1 - fx) + px(y1, x1) * fx;
                patch.at(y, x, c) = static_cast<float>((top * (1 - fy) + bot * fy) * scale);
            }
        }
    }
    return patch;
}

void write_ppm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& rgb) {
    if (static_cast<std::size_t>(width) * height * 3 != rgb.size())
        throw IoError("pixel buffer does not match the declared size");
    std::ofstream out = open_output(path);
    out << "P6\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("write failure: " + path);
}

TrackerConfig load_config(const std::string& path, TrackerConfig base) {
    std::ifstream in = open_input(path);
    std::string line;
    int line_no = 0;
    TrackerConfig cfg = base;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string_view trimmed = trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        if (eq == std::string_view::npos)
            throw MalformedRow(line_no, "expected `key = value`");
        const std::string key(trim(trimmed.substr(0, eq)));
        const std::string value(trim(trimmed.substr(eq + 1)));
        if (key.empty() || value.empty())
            throw MalformedRow(line_no, "expected `key = value`");

        bool ok = false;
        auto real = [&]() {
            const double v = parse_double(value, ok);
            if (!ok) throw MalformedRow(line_no, "bad numeric value for " + key);
            return v;
        };
        auto integer = [&]() {
            const long v = parse_long(value, ok);
            if (!ok) throw MalformedRow(line_no, "bad integer value for " + key);
            return static_cast<int>(v);
        };

        if (key == "beta_age") cfg.beta_age = real();
        else if (key == "beta_intv") cfg.beta_intv = real();
        else if (key == "tau_hist") cfg.tau_hist = real();
        else if (key == "tau_iou") cfg.tau_iou = real();
        else if (key == "beta_dist") cfg.beta_dist = real();
        else if (key == "tau_shp") cfg.tau_shp = real();
        else if (key == "tau_init") cfg.tau_init = integer();
        else if (key == "beta_term") cfg.beta_term = real();
        else if (key == "tau_match") cfg.tau_match = real();
        else if (key == "tau_cue") cfg.tau_cue = integer();
        else if (key == "lambda_c") cfg.lambda_c = real();
        else if (key == "lambda_f_histogram") cfg.lambda_f_histogram = real();
        else if (key == "lambda_f_embedding") cfg.lambda_f_embedding = real();
        else if (key == "tau_a") cfg.tau_a = real();
        else if (key == "fps") cfg.fps = integer();
        else if (key == "likelihood_mode") cfg.likelihood_mode = parse_likelihood_mode(value);
        else if (key == "init_mode") cfg.init_mode = parse_init_mode(value);
        else if (key == "eta") cfg.geometry.eta = real();
        else if (key == "xi") cfg.geometry.xi = real();
        else if (key == "sigma_xx") cfg.geometry.sigma(0, 0) = real();
        else if (key == "sigma_xy") { const double v = real(); cfg.geometry.sigma(0, 1) = v; cfg.geometry.sigma(1, 0) = v; }
        else if (key == "sigma_yy") cfg.geometry.sigma(1, 1) = real();
        else if (key == "q_pos") cfg.geometry.kalman.q_pos = real();
        else if (key == "q_vel") cfg.geometry.kalman.q_vel = real();
        else if (key == "r_meas") cfg.geometry.kalman.r_meas = real();
        else if (key == "p0_pos") cfg.geometry.kalman.p0_pos = real();
        else if (key == "p0_vel") cfg.geometry.kalman.p0_vel = real();
        else if (key == "gamma_shape") cfg.geometry.gamma_shape = real();
        else if (key == "oracle_same") cfg.oracle_same = real();
        else if (key == "oracle_diff") cfg.oracle_diff = real();
        else if (key == "nms_iou") cfg.nms_iou = real();
        else if (key == "nms_conf_min") cfg.nms_conf_min = real();
        else if (key == "threads") cfg.threads = integer();
        else throw MalformedRow(line_no, "unknown config key: " + key);
    }
    return cfg;
}

ScenarioSpec parse_scenario_spec(const std::string& path) {
    std::ifstream in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad scenario json (" + path + "): " + e.what());
    }
    ScenarioSpec spec;
    try {
        spec.arena_w = j.value("arena_w", spec.arena_w);
        spec.arena_h = j.value("arena_h", spec.arena_h);
        spec.n_frames = j.value("n_frames", spec.n_frames);
        spec.fps = j.value("fps", spec.fps);
        spec.pos_noise = j.value("pos_noise", spec.pos_noise);
        spec.size_noise = j.value("size_noise", spec.size_noise);
        spec.dropout = j.value("dropout", spec.dropout);
        spec.descriptor_noise = j.value("descriptor_noise", spec.descriptor_noise);
        spec.clutter_rate = j.value("clutter_rate", spec.clutter_rate);
        spec.clutter_burst = j.value("clutter_burst", spec.clutter_burst);
        spec.clutter_cx = j.value("clutter_cx", spec.clutter_cx);
        spec.clutter_cy = j.value("clutter_cy", spec.clutter_cy);
        spec.clutter_spread = j.value("clutter_spread", spec.clutter_spread);
        spec.clutter_width = j.value("clutter_width", spec.clutter_width);
        spec.clutter_height = j.value("clutter_height", spec.clutter_height);
        spec.seed = j.value("seed", spec.seed);
        for (const auto& jt : j.value("targets", nlohmann::json::array())) {
            TargetSpec t;
            t.width = jt.value("width", t.width);
            t.height = jt.value("height", t.height);
            for (const auto& jw : jt.at("waypoints"))
                t.waypoints.push_back(Waypoint{jw.at(0).get<int>(), jw.at(1).get<double>(),
                                               jw.at(2).get<double>()});
            spec.targets.push_back(std::move(t));
        }
        for (const auto& jo : j.value("occlusions", nlohmann::json::array()))
            spec.occlusions.push_back(OcclusionWindow{jo.at(0).get<int>(), jo.at(1).get<int>(),
                                                      jo.at(2).get<int>()});
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad scenario json (" + path + "): " + e.what());
    }
    return spec;
}

}  // namespace tamatrack
