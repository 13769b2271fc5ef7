#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/datapipe/dataset.hpp"
#include "foga/engine/checkpoint.hpp"
#include "foga/engine/config.hpp"
#include "foga/model/backbone.hpp"
#include "foga/model/losses.hpp"
#include "foga/nn/adam.hpp"

namespace foga {

struct TrainStats {
    std::uint64_t steps = 0;
    double final_loss = 0;
    std::vector<double> epoch_loss;
};

namespace detail {

struct WindowRef {
    int video = 0;
    int base = 0;
};

template <class T>
void gather_batch(const std::vector<std::vector<Tensor<T>>>& frames,
                  const std::vector<WindowRef>& refs, std::size_t begin, std::size_t end,
                  int t, int sigma, Tensor<T>& x, Tensor<T>& ti, Tensor<T>& tf) {
    const int b = static_cast<int>(end - begin);
    const Tensor<T>& probe = frames[0][0];
    const int c_in = probe.c(), s = probe.h();
    x = Tensor<T>(b, t * c_in, s, s);
    ti = Tensor<T>(b, c_in, s, s);
    tf = Tensor<T>(b, c_in, s, s);
    const std::size_t frame_len = static_cast<std::size_t>(c_in) * s * s;
    for (int k = 0; k < b; ++k) {
        const WindowRef& r = refs[begin + static_cast<std::size_t>(k)];
        const auto& video = frames[static_cast<std::size_t>(r.video)];
        for (int f = 0; f < t; ++f)
            std::copy(video[static_cast<std::size_t>(r.base - t + 1 + f)].data(),
                      video[static_cast<std::size_t>(r.base - t + 1 + f)].data() + frame_len,
                      x.plane(k, f * c_in));
        std::copy(video[static_cast<std::size_t>(r.base + 1)].data(),
                  video[static_cast<std::size_t>(r.base + 1)].data() + frame_len,
                  ti.plane(k, 0));
        std::copy(video[static_cast<std::size_t>(r.base + sigma)].data(),
                  video[static_cast<std::size_t>(r.base + sigma)].data() + frame_len,
                  tf.plane(k, 0));
    }
}

}  // namespace detail

/// Minimize the combined objective over all training windows. Training reads
/// only the train split; a labeled or test-split index is rejected.
/// Returns the trained network (checkpoints also land in `out_dir` when set).
inline std::pair<FogaNet<float>, TrainStats> train(const RunConfig& cfg,
                                                   const DatasetIndex& dataset,
                                                   const std::string& out_dir = "",
                                                   std::ostream* progress = nullptr) {
    cfg.validate();
    if (dataset.split != Split::Train)
        throw config_error("train: expected the train split");
    for (const auto& v : dataset.videos)
        if (!v.labels.empty())
            throw config_error("train: refusing labeled video " + v.id +
                               " (training never reads labels)");
    if (dataset.videos.empty()) throw data_error("train: empty dataset");

    const int t = cfg.model.t, sigma = cfg.model.sigma;
    std::vector<std::vector<Tensor<float>>> frames;
    frames.reserve(dataset.videos.size());
    std::vector<detail::WindowRef> refs;
    for (std::size_t vi = 0; vi < dataset.videos.size(); ++vi) {
        frames.push_back(preprocess_video<float>(dataset.videos[vi], cfg.model.c_in,
                                                 cfg.model.input_size));
        for (int b : window_base_indices(static_cast<int>(frames.back().size()), t, sigma, 1))
            refs.push_back({static_cast<int>(vi), b});
    }
    if (refs.empty()) throw data_error("train: no usable windows (videos too short)");

    FogaNet<float> net(cfg.model);
    net.init_weights(cfg.train.seed);
    Adam<float> opt(net.parameters(), static_cast<float>(cfg.train.lr));

    std::ofstream log;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        log.open(std::filesystem::path(out_dir) / "train_log.jsonl");
    }

    TrainStats stats;
    Rng shuffle_rng(cfg.train.seed ^ 0x5bd1e995u);
    std::uint64_t step = 0;
    Tensor<float> x, ti, tf;
    for (int epoch = 0; epoch < cfg.train.epochs; ++epoch) {
        // Fisher-Yates with the pinned generator keeps epochs reproducible.
        for (std::size_t i = refs.size(); i > 1; --i)
            std::swap(refs[i - 1],
                      refs[static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
        double epoch_loss = 0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < refs.size(); begin += static_cast<std::size_t>(cfg.train.batch)) {
            const std::size_t end = std::min(refs.size(), begin + static_cast<std::size_t>(cfg.train.batch));
            detail::gather_batch(frames, refs, begin, end, t, sigma, x, ti, tf);
            PredictionPair<float> pair = net.forward(x, true);
            auto result = total_loss(pair, ti, tf, cfg.train.mask, cfg.train.ssim, true);
            const double loss = result.breakdown.total;
            if (!std::isfinite(loss))
                throw runtime_failure(
                    "train: non-finite loss at step " + std::to_string(step) +
                    " (l_pred=" + std::to_string(result.breakdown.l_pred) +
                    ", l_fc=" + std::to_string(result.breakdown.l_fc) +
                    ", l_con=" + std::to_string(result.breakdown.l_con) + ")");
            opt.zero_grad();
            net.backward(result.grad_immediate, result.grad_forward);
            opt.clip_grad_norm(static_cast<float>(cfg.train.clip_norm));
            opt.step();
            ++step;
            epoch_loss += loss;
            ++batches;
            stats.final_loss = loss;
            if (log && (step % static_cast<std::uint64_t>(std::max(1, cfg.train.log_every)) == 0)) {
                log << json{{"step", step},
                            {"epoch", epoch},
                            {"l_pred", result.breakdown.l_pred},
                            {"l_fc", result.breakdown.l_fc},
                            {"l_con", result.breakdown.l_con},
                            {"total", loss}}
                           .dump()
                    << "\n";
            }
            if (!out_dir.empty() && cfg.train.checkpoint_every > 0 &&
                step % static_cast<std::uint64_t>(cfg.train.checkpoint_every) == 0)
                save_checkpoint(
                    (std::filesystem::path(out_dir) / ("checkpoint_" + std::to_string(step) + ".foga"))
                        .string(),
                    net, step);
        }
        stats.epoch_loss.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(1, batches)));
        if (progress)
            (*progress) << "epoch " << epoch + 1 << "/" << cfg.train.epochs
                        << " mean_loss=" << stats.epoch_loss.back() << "\n";
    }
    stats.steps = step;
    if (!out_dir.empty())
        save_checkpoint((std::filesystem::path(out_dir) / "checkpoint_final.foga").string(), net,
                        step);
    return {std::move(net), std::move(stats)};
}

/// One optimizer step on an explicit batch; returns (loss before, loss after).
/// Used by tests and the training-sanity examples.
inline std::pair<double, double> train_single_step(FogaNet<float>& net, Adam<float>& opt,
                                                   const Tensor<float>& x,
                                                   const Tensor<float>& target_immediate,
                                                   const Tensor<float>& target_forward,
                                                   const LossMask& mask, const SsimConfig& ssim_cfg) {
    PredictionPair<float> pair = net.forward(x, true);
    auto result = total_loss(pair, target_immediate, target_forward, mask, ssim_cfg, true);
    opt.zero_grad();
    net.backward(result.grad_immediate, result.grad_forward);
    opt.step();
    PredictionPair<float> after = net.forward(x, false);
    auto post = total_loss(after, target_immediate, target_forward, mask, ssim_cfg, false);
    return {result.breakdown.total, post.breakdown.total};
}

}  // namespace foga
