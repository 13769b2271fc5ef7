#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <sys/resource.h>

#include "foga/datapipe/dataset.hpp"
#include "foga/engine/config.hpp"
#include "foga/model/backbone.hpp"
#include "foga/scoring/scoring.hpp"

namespace foga {

inline double peak_rss_gb() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);  // kB on Linux
}

struct VideoEval {
    std::string video_id;
    int frames = 0;
    std::optional<double> auc;  // absent when the video has a single class
};

struct EvalReport {
    double micro_auc = 0;                // over the concatenated test stream
    std::optional<double> macro_auc;     // mean of defined per-video AUCs
    std::vector<VideoEval> videos;
    std::vector<std::string> skipped;    // too-short videos
    std::size_t params = 0;
    double flops = 0;
    double peak_mem_gb = 0;
    std::string config_hash;
    json config;
};

inline json eval_report_to_json(const EvalReport& r) {
    json videos = json::array();
    for (const auto& v : r.videos) {
        json jv{{"video_id", v.video_id}, {"frames", v.frames}};
        if (v.auc) jv["auc"] = *v.auc;
        videos.push_back(jv);
    }
    json j{{"micro_auc", r.micro_auc},
           {"videos", videos},
           {"skipped", r.skipped},
           {"params", r.params},
           {"flops", r.flops},
           {"peak_mem_gb", r.peak_mem_gb},
           {"config_hash", r.config_hash},
           {"config", r.config}};
    if (r.macro_auc) j["macro_auc"] = *r.macro_auc;
    return j;
}

inline EvalReport eval_report_from_json(const json& j) {
    EvalReport r;
    r.micro_auc = j.at("micro_auc").get<double>();
    if (j.contains("macro_auc")) r.macro_auc = j.at("macro_auc").get<double>();
    for (const auto& jv : j.at("videos")) {
        VideoEval v;
        v.video_id = jv.at("video_id").get<std::string>();
        v.frames = jv.at("frames").get<int>();
        if (jv.contains("auc")) v.auc = jv.at("auc").get<double>();
        r.videos.push_back(v);
    }
    r.skipped = j.at("skipped").get<std::vector<std::string>>();
    r.params = j.at("params").get<std::size_t>();
    r.flops = j.at("flops").get<double>();
    r.peak_mem_gb = j.at("peak_mem_gb").get<double>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.config = j.at("config");
    return r;
}

struct EvalResult {
    EvalReport report;
    std::vector<ScoreSeries> series;  // one per scored video, index order
};

/// Score every test video with an arbitrary predictor and aggregate
/// frame-level AUC. Videos shorter than t + sigma are skipped with a record.
template <class Predictor>
EvalResult evaluate_with_predictor(Predictor&& predict, const DatasetIndex& dataset,
                                   const RunConfig& cfg) {
    if (dataset.split != Split::Test) throw config_error("evaluate: expected the test split");
    EvalResult out;
    std::vector<double> all_scores;
    std::vector<int> all_labels;
    for (const auto& video : dataset.videos) {
        if (video.labels.empty())
            throw data_error("evaluate: video " + video.id + " has no labels");
        if (static_cast<int>(video.labels.size()) != video.frame_count())
            throw data_error("evaluate: label/frame count mismatch for video " + video.id);
        if (video.frame_count() < cfg.model.t + cfg.model.sigma) {
            out.report.skipped.push_back(video.id);
            continue;
        }
        auto frames = preprocess_video<float>(video, cfg.model.c_in, cfg.model.input_size);
        ScoreSeries s = score_video(frames, predict, cfg.model.t, cfg.model.sigma, cfg.scoring,
                                    video.id);
        VideoEval ve;
        ve.video_id = video.id;
        ve.frames = video.frame_count();
        bool has_pos = false, has_neg = false;
        for (int l : video.labels) (l != 0 ? has_pos : has_neg) = true;
        if (has_pos && has_neg) ve.auc = frame_auc(s.anomaly, video.labels);
        all_scores.insert(all_scores.end(), s.anomaly.begin(), s.anomaly.end());
        all_labels.insert(all_labels.end(), video.labels.begin(), video.labels.end());
        out.report.videos.push_back(std::move(ve));
        out.series.push_back(std::move(s));
    }
    if (out.series.empty()) throw data_error("evaluate: no scorable videos");
    out.report.micro_auc = frame_auc(all_scores, all_labels);
    double macro = 0;
    int defined = 0;
    for (const auto& v : out.report.videos)
        if (v.auc) { macro += *v.auc; ++defined; }
    if (defined > 0) out.report.macro_auc = macro / defined;
    out.report.peak_mem_gb = peak_rss_gb();
    out.report.config_hash = config_hash(cfg);
    out.report.config = config_to_json(cfg);
    return out;
}

/// Standard path: frozen network as the predictor, with budget numbers
/// embedded in the report.
inline EvalResult evaluate(FogaNet<float>& net, const DatasetIndex& dataset,
                           const RunConfig& cfg) {
    auto predict = [&net](const Tensor<float>& x) { return net.forward(x, false); };
    EvalResult out = evaluate_with_predictor(predict, dataset, cfg);
    out.report.params = net.param_count();
    out.report.flops = net.estimate_flops();
    return out;
}

}  // namespace foga
