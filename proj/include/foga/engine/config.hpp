#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foga/core/errors.hpp"
#include "foga/datapipe/synthetic.hpp"
#include "foga/model/config.hpp"
#include "foga/model/losses.hpp"
#include "foga/scoring/scoring.hpp"

namespace foga {

using json = nlohmann::json;

struct TrainConfig {
    double lr = 2e-4;
    int batch = 8;
    int epochs = 10;
    std::uint64_t seed = 0;
    double clip_norm = 0.0;  // 0 disables clipping
    int log_every = 10;
    int checkpoint_every = 0;  // steps; 0 = final checkpoint only
    LossMask mask;
    SsimConfig ssim;

    void validate() const {
        if (lr <= 0) throw config_error("train: lr must be positive");
        if (batch < 1) throw config_error("train: batch must be >= 1");
        if (epochs < 1) throw config_error("train: epochs must be >= 1");
        ssim.validate();
    }
};

/// Everything one run needs; serialized next to every output.
struct RunConfig {
    std::string profile = "desk";
    ModelConfig model;
    TrainConfig train;
    ScoringConfig scoring;
    SyntheticSpec synth;
    std::string data_root;

    void validate() const {
        model.validate();
        train.validate();
        scoring.pyramid.validate();
        if (scoring.lambda < 0) throw config_error("scoring: lambda must be >= 0");
        if (scoring.smooth_sigma <= 0) throw config_error("scoring: smooth_sigma must be positive");
    }
};

/// Benchmark profiles. Horizon and fusion weights follow the published
/// setup; the desk profile shrinks resolution and width so a full training
/// run fits a single CPU core.
inline RunConfig profile_config(const std::string& name) {
    RunConfig cfg;
    cfg.profile = name;
    if (name == "desk") {
        cfg.model.t = 4;
        cfg.model.sigma = 4;
        cfg.model.input_size = 64;
        cfg.model.channel_plan = {8, 16, 32, 64};
        cfg.model.cfa_reduction = 4;
        cfg.scoring.lambda = 0.06;
    } else if (name == "ped1" || name == "shtech") {
        cfg.model.t = 4;
        cfg.scoring.lambda = 0.06;
    } else if (name == "ped2") {
        cfg.model.t = 4;
        cfg.scoring.lambda = 1.0;
    } else if (name == "avenue") {
        cfg.model.t = 8;
        cfg.scoring.lambda = 0.2;
    } else {
        throw config_error("unknown profile: " + name +
                           " (expected desk|ped1|ped2|avenue|shtech)");
    }
    return cfg;
}

namespace detail {

template <class T>
void overlay(const json& j, const char* key, T& value) {
    if (j.contains(key)) value = j.at(key).get<T>();
}

inline void overlay_model(const json& j, ModelConfig& m) {
    overlay(j, "t", m.t);
    overlay(j, "sigma", m.sigma);
    overlay(j, "c_in", m.c_in);
    overlay(j, "input_size", m.input_size);
    if (j.contains("channel_plan")) {
        const auto v = j.at("channel_plan").get<std::vector<int>>();
        if (v.size() != 4) throw config_error("model.channel_plan must have 4 entries");
        std::copy(v.begin(), v.end(), m.channel_plan.begin());
    }
    overlay(j, "use_cfa", m.use_cfa);
    overlay(j, "use_ega", m.use_ega);
    overlay(j, "cfa_reduction", m.cfa_reduction);
    overlay(j, "eca_b", m.eca_b);
    overlay(j, "eca_gamma", m.eca_gamma);
    overlay(j, "norm_groups", m.norm_groups);
    overlay(j, "activation", m.activation);
}

inline void overlay_train(const json& j, TrainConfig& t) {
    overlay(j, "lr", t.lr);
    overlay(j, "batch", t.batch);
    overlay(j, "epochs", t.epochs);
    overlay(j, "seed", t.seed);
    overlay(j, "clip_norm", t.clip_norm);
    overlay(j, "log_every", t.log_every);
    overlay(j, "checkpoint_every", t.checkpoint_every);
    if (j.contains("loss_mask")) {
        const json& m = j.at("loss_mask");
        overlay(m, "pred", t.mask.use_pred);
        overlay(m, "fc", t.mask.use_fc);
        overlay(m, "con", t.mask.use_con);
        overlay(m, "grad", t.mask.use_grad);
    }
    if (j.contains("ssim")) {
        const json& s = j.at("ssim");
        overlay(s, "window", t.ssim.window);
        overlay(s, "window_std", t.ssim.window_std);
        overlay(s, "k1", t.ssim.k1);
        overlay(s, "k2", t.ssim.k2);
        overlay(s, "dynamic_range", t.ssim.dynamic_range);
    }
}

inline void overlay_scoring(const json& j, ScoringConfig& s) {
    overlay(j, "lambda", s.lambda);
    if (j.contains("mode")) s.mode = score_mode_from_string(j.at("mode").get<std::string>());
    overlay(j, "pyramid_windows", s.pyramid.windows);
    overlay(j, "epsilon", s.pyramid.epsilon);
    if (j.contains("epsilon")) s.plain_epsilon = j.at("epsilon").get<double>();
    overlay(j, "smooth_sigma", s.smooth_sigma);
}

inline void overlay_synth(const json& j, SyntheticSpec& s) {
    overlay(j, "num_train_videos", s.num_train_videos);
    overlay(j, "num_test_videos", s.num_test_videos);
    overlay(j, "frames_per_video", s.frames_per_video);
    overlay(j, "height", s.height);
    overlay(j, "width", s.width);
    overlay(j, "shapes_min", s.shapes_min);
    overlay(j, "shapes_max", s.shapes_max);
    overlay(j, "size_min", s.size_min);
    overlay(j, "size_max", s.size_max);
    overlay(j, "vel_min", s.vel_min);
    overlay(j, "vel_max", s.vel_max);
    overlay(j, "anomaly_types", s.anomaly_types);
    overlay(j, "anomalies_per_video", s.anomalies_per_video);
    overlay(j, "interval_min", s.interval_min);
    overlay(j, "interval_max", s.interval_max);
    overlay(j, "teleport_jitter", s.teleport_jitter);
    overlay(j, "speed_factor", s.speed_factor);
    overlay(j, "seed", s.seed);
}

}  // namespace detail

/// Resolve a (possibly partial) JSON tree into a full RunConfig: profile
/// defaults first, then explicit keys on top.
inline RunConfig resolve_config(const json& j) {
    const std::string profile =
        j.contains("profile") ? j.at("profile").get<std::string>() : std::string("desk");
    RunConfig cfg = profile_config(profile);
    if (j.contains("model")) detail::overlay_model(j.at("model"), cfg.model);
    if (j.contains("train")) detail::overlay_train(j.at("train"), cfg.train);
    if (j.contains("scoring")) detail::overlay_scoring(j.at("scoring"), cfg.scoring);
    if (j.contains("synth")) detail::overlay_synth(j.at("synth"), cfg.synth);
    detail::overlay(j, "data_root", cfg.data_root);
    cfg.validate();
    return cfg;
}

inline json model_to_json(const ModelConfig& m) {
    return json{{"t", m.t},
                {"sigma", m.sigma},
                {"c_in", m.c_in},
                {"input_size", m.input_size},
                {"channel_plan", std::vector<int>(m.channel_plan.begin(), m.channel_plan.end())},
                {"use_cfa", m.use_cfa},
                {"use_ega", m.use_ega},
                {"cfa_reduction", m.cfa_reduction},
                {"eca_b", m.eca_b},
                {"eca_gamma", m.eca_gamma},
                {"norm_groups", m.norm_groups},
                {"activation", m.activation}};
}

inline ModelConfig model_from_json(const json& j) {
    ModelConfig m;
    detail::overlay_model(j, m);
    return m;
}

inline json config_to_json(const RunConfig& cfg) {
    json j;
    j["profile"] = cfg.profile;
    j["model"] = model_to_json(cfg.model);
    j["train"] = json{{"lr", cfg.train.lr},
                      {"batch", cfg.train.batch},
                      {"epochs", cfg.train.epochs},
                      {"seed", cfg.train.seed},
                      {"clip_norm", cfg.train.clip_norm},
                      {"log_every", cfg.train.log_every},
                      {"checkpoint_every", cfg.train.checkpoint_every},
                      {"loss_mask",
                       json{{"pred", cfg.train.mask.use_pred},
                            {"fc", cfg.train.mask.use_fc},
                            {"con", cfg.train.mask.use_con},
                            {"grad", cfg.train.mask.use_grad}}},
                      {"ssim",
                       json{{"window", cfg.train.ssim.window},
                            {"window_std", cfg.train.ssim.window_std},
                            {"k1", cfg.train.ssim.k1},
                            {"k2", cfg.train.ssim.k2},
                            {"dynamic_range", cfg.train.ssim.dynamic_range}}}};
    j["scoring"] = json{{"lambda", cfg.scoring.lambda},
                        {"mode", score_mode_name(cfg.scoring.mode)},
                        {"pyramid_windows", cfg.scoring.pyramid.windows},
                        {"epsilon", cfg.scoring.pyramid.epsilon},
                        {"smooth_sigma", cfg.scoring.smooth_sigma}};
    j["synth"] = json{{"num_train_videos", cfg.synth.num_train_videos},
                      {"num_test_videos", cfg.synth.num_test_videos},
                      {"frames_per_video", cfg.synth.frames_per_video},
                      {"height", cfg.synth.height},
                      {"width", cfg.synth.width},
                      {"shapes_min", cfg.synth.shapes_min},
                      {"shapes_max", cfg.synth.shapes_max},
                      {"size_min", cfg.synth.size_min},
                      {"size_max", cfg.synth.size_max},
                      {"vel_min", cfg.synth.vel_min},
                      {"vel_max", cfg.synth.vel_max},
                      {"anomaly_types", cfg.synth.anomaly_types},
                      {"anomalies_per_video", cfg.synth.anomalies_per_video},
                      {"interval_min", cfg.synth.interval_min},
                      {"interval_max", cfg.synth.interval_max},
                      {"teleport_jitter", cfg.synth.teleport_jitter},
                      {"speed_factor", cfg.synth.speed_factor},
                      {"seed", cfg.synth.seed}};
    j["data_root"] = cfg.data_root;
    return j;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string config_hash(const RunConfig& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_json(cfg).dump())));
    return buf;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("malformed config " + path + ": " + e.what());
    }
    return j;
}

/// Apply one `dotted.key=value` override onto a JSON tree. Values parse as
/// JSON when possible, else as strings.
inline void apply_override(json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("override must look like key.path=value: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (...) {
        value = raw;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw config_error("bad override key: " + path);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

}  // namespace foga
