#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "foga/datapipe/synthetic.hpp"
#include "foga/engine/config.hpp"
#include "foga/model/backbone.hpp"
#include "foga/scoring/scoring.hpp"

namespace foga {

struct BenchRecord {
    std::size_t params = 0;
    double flops = 0;
    int frames = 0;
    double fps_plain = 0;     // end-to-end: preprocess + predict + score
    double fps_pyramid = 0;
    double fps_model_only = 0;
    double ms_preprocess = 0;  // per frame
    double ms_forward = 0;
    double us_score_plain = 0;
    double us_score_pyramid = 0;
};

inline json bench_record_to_json(const BenchRecord& r) {
    return json{{"params", r.params},
                {"flops", r.flops},
                {"frames", r.frames},
                {"fps_plain", r.fps_plain},
                {"fps_pyramid", r.fps_pyramid},
                {"fps_model_only", r.fps_model_only},
                {"ms_preprocess", r.ms_preprocess},
                {"ms_forward", r.ms_forward},
                {"us_score_plain", r.us_score_plain},
                {"us_score_pyramid", r.us_score_pyramid}};
}

/// Throughput measurement over a generated clip. The prediction stage is
/// shared between the two scoring modes; scoring itself is cheap per frame,
/// so it is timed over `score_repeats` passes for a stable per-frame figure.
/// Per-frame latency for a mode is then shared stage + that mode's scoring.
inline BenchRecord bench(FogaNet<float>& net, const RunConfig& cfg, int frames = 200,
                         int score_repeats = 50) {
    using clock = std::chrono::steady_clock;
    const ModelConfig& m = cfg.model;
    SyntheticSpec spec = cfg.synth;
    spec.num_train_videos = 1;
    spec.num_test_videos = 0;
    spec.frames_per_video = frames + m.t + m.sigma + 4;
    spec.height = m.input_size;
    spec.width = m.input_size;
    spec.anomalies_per_video = 0;
    auto [clip, unused] = synth_generate(spec);
    const VideoEntry& video = clip.videos.front();

    // Warm up caches and BLAS threads.
    std::vector<Tensor<float>> warm;
    for (int i = 0; i < m.t; ++i)
        warm.push_back(preprocess_frame<float>(video.frame(i), m.c_in, m.input_size));
    Tensor<float> wx = stack_window_inputs(warm, m.t - 1, m.t);
    for (int i = 0; i < 3; ++i) net.forward(wx, false);

    BenchRecord rec;
    rec.frames = frames;
    rec.params = net.param_count();
    rec.flops = net.estimate_flops();

    double sec_pre = 0, sec_fwd = 0, sec_maps = 0;
    std::vector<ErrorMap<float>> maps;
    maps.reserve(static_cast<std::size_t>(frames));
    std::vector<Tensor<float>> ring;
    const int total_needed = frames + m.sigma;
    for (int i = 0; i < m.t - 1 + total_needed; ++i) {
        const auto t0 = clock::now();
        ring.push_back(preprocess_frame<float>(video.frame(i), m.c_in, m.input_size));
        sec_pre += std::chrono::duration<double>(clock::now() - t0).count();
    }
    for (int f = 0; f < frames; ++f) {
        const int base = m.t - 1 + f;
        Tensor<float> x = stack_window_inputs(ring, base, m.t);
        const auto t0 = clock::now();
        PredictionPair<float> pair = net.forward(x, false);
        const auto t1 = clock::now();
        sec_fwd += std::chrono::duration<double>(t1 - t0).count();
        ErrorMap<float> e_i = error_map(pair.immediate, ring[static_cast<std::size_t>(base + 1)]);
        ErrorMap<float> e_f =
            error_map(pair.forward, ring[static_cast<std::size_t>(base + m.sigma)], Horizon::Forward);
        maps.push_back(hybrid_error(e_i, e_f, cfg.scoring.lambda));
        sec_maps += std::chrono::duration<double>(clock::now() - t1).count();
    }

    double sink = 0;
    const auto tp0 = clock::now();
    for (int r = 0; r < score_repeats; ++r)
        for (const auto& e : maps) sink += plain_psnr(e, cfg.scoring.plain_epsilon);
    const double sec_plain =
        std::chrono::duration<double>(clock::now() - tp0).count() / score_repeats;
    const auto ty0 = clock::now();
    for (int r = 0; r < score_repeats; ++r)
        for (const auto& e : maps) sink += pyramid_psnr(e, cfg.scoring.pyramid);
    const double sec_pyramid =
        std::chrono::duration<double>(clock::now() - ty0).count() / score_repeats;
    if (!std::isfinite(sink)) throw runtime_failure("bench: non-finite score");

    const double pre_per_frame = sec_pre / (m.t - 1 + total_needed);
    const double shared = pre_per_frame * frames + sec_fwd + sec_maps;
    rec.fps_plain = frames / (shared + sec_plain);
    rec.fps_pyramid = frames / (shared + sec_pyramid);
    rec.fps_model_only = frames / sec_fwd;
    rec.ms_preprocess = 1e3 * pre_per_frame;
    rec.ms_forward = 1e3 * sec_fwd / frames;
    rec.us_score_plain = 1e6 * sec_plain / frames;
    rec.us_score_pyramid = 1e6 * sec_pyramid / frames;
    return rec;
}

}  // namespace foga
