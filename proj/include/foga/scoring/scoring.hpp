#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"
#include "foga/datapipe/dataset.hpp"
#include "foga/model/backbone.hpp"

namespace foga {

enum class Horizon { Immediate, Forward, Hybrid };

/// Per-pixel channel-averaged squared error.
template <class T>
struct ErrorMap {
    int h = 0, w = 0;
    std::vector<T> v;
    Horizon horizon = Horizon::Immediate;

    T at(int i, int j) const { return v[static_cast<std::size_t>(i) * w + j]; }
    T mean() const {
        return v.empty() ? T(0)
                         : std::accumulate(v.begin(), v.end(), T(0)) / static_cast<T>(v.size());
    }
};

struct PyramidConfig {
    std::vector<int> windows = {4, 8, 16, 32};
    double epsilon = 1e-8;  // floor on the pooled error sum

    void validate() const {
        if (windows.empty()) throw config_error("pyramid: needs at least one window");
        for (std::size_t i = 0; i < windows.size(); ++i) {
            if (windows[i] < 1) throw config_error("pyramid: window must be >= 1");
            if (i > 0 && windows[i] <= windows[i - 1])
                throw config_error("pyramid: windows must be strictly increasing");
        }
        if (epsilon <= 0) throw config_error("pyramid: epsilon must be positive");
    }
};

enum class ScoreMode { Plain, Pyramid };

inline ScoreMode score_mode_from_string(const std::string& s) {
    if (s == "plain") return ScoreMode::Plain;
    if (s == "pyramid") return ScoreMode::Pyramid;
    throw config_error("unknown score mode: " + s);
}
inline const char* score_mode_name(ScoreMode m) {
    return m == ScoreMode::Plain ? "plain" : "pyramid";
}

template <class T>
ErrorMap<T> error_map(const Tensor<T>& pred, const Tensor<T>& gt,
                      Horizon horizon = Horizon::Immediate) {
    if (!pred.same_shape(gt))
        throw config_error("error_map: shape mismatch " + pred.shape_str() + " vs " +
                           gt.shape_str());
    ErrorMap<T> e;
    e.h = pred.h();
    e.w = pred.w();
    e.horizon = horizon;
    e.v.assign(static_cast<std::size_t>(e.h) * e.w, T(0));
    const std::size_t plane = e.v.size();
    for (int n = 0; n < pred.n(); ++n) {
        for (int c = 0; c < pred.c(); ++c) {
            const T* p = pred.plane(n, c);
            const T* g = gt.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) {
                const T d = p[i] - g[i];
                e.v[i] += d * d;
            }
        }
    }
    const T inv = T(1) / static_cast<T>(pred.n() * pred.c());
    for (auto& x : e.v) x *= inv;
    return e;
}

/// E = E_i + lambda * E_f, element-wise.
template <class T>
ErrorMap<T> hybrid_error(const ErrorMap<T>& e_i, const ErrorMap<T>& e_f, double lambda) {
    if (lambda < 0) throw config_error("hybrid_error: lambda must be >= 0");
    if (e_i.h != e_f.h || e_i.w != e_f.w) throw config_error("hybrid_error: shape mismatch");
    ErrorMap<T> e = e_i;
    e.horizon = Horizon::Hybrid;
    for (std::size_t i = 0; i < e.v.size(); ++i)
        e.v[i] = e_i.v[i] + static_cast<T>(lambda) * e_f.v[i];
    return e;
}

/// Largest mean-pooled patch value at one window size (non-overlapping
/// patches, remainder truncated; degenerate windows fall back to the map
/// mean).
template <class T>
double pooled_max(const ErrorMap<T>& e, int window) {
    const int ph = e.h / window, pw = e.w / window;
    if (ph == 0 || pw == 0) return static_cast<double>(e.mean());
    double best = -1;
    const double inv = 1.0 / (static_cast<double>(window) * window);
    for (int bi = 0; bi < ph; ++bi) {
        for (int bj = 0; bj < pw; ++bj) {
            double s = 0;
            for (int i = 0; i < window; ++i) {
                const T* row = e.v.data() + static_cast<std::size_t>(bi * window + i) * e.w +
                               static_cast<std::size_t>(bj) * window;
                for (int j = 0; j < window; ++j) s += row[j];
            }
            best = std::max(best, s * inv);
        }
    }
    return best;
}

/// Multi-scale score: each pyramid level contributes its worst patch error.
template <class T>
double pyramid_psnr(const ErrorMap<T>& e, const PyramidConfig& cfg = {}) {
    cfg.validate();
    double sum = 0;
    for (int w : cfg.windows) sum += pooled_max(e, w);
    return 10.0 * std::log10(1.0 / std::max(sum, cfg.epsilon));
}

/// Single-scale score over the map mean.
template <class T>
double plain_psnr(const ErrorMap<T>& e, double epsilon = 1e-8) {
    return 10.0 * std::log10(1.0 / std::max(static_cast<double>(e.mean()), epsilon));
}

/// Per-video min-max normalization; a constant series maps to all zeros.
inline std::vector<double> normalize_scores(const std::vector<double>& psnr) {
    if (psnr.empty()) throw config_error("normalize_scores: empty series");
    const auto [mn_it, mx_it] = std::minmax_element(psnr.begin(), psnr.end());
    const double mn = *mn_it, mx = *mx_it;
    std::vector<double> out(psnr.size(), 0.0);
    if (mx - mn < 1e-12) return out;
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < psnr.size(); ++i) out[i] = (psnr[i] - mn) * inv;
    return out;
}

/// 1-D Gaussian smoothing, radius ceil(3 sigma), reflected at the ends.
inline std::vector<double> gaussian_smooth(const std::vector<double>& series, double sigma) {
    if (sigma <= 0) throw config_error("gaussian_smooth: sigma must be positive");
    if (series.empty()) return {};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (auto& k : kernel) k /= sum;
    const int n = static_cast<int>(series.size());
    auto reflect = [n](int i) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
            if (n == 1) return 0;
        }
        return i;
    };
    std::vector<double> out(series.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int j = -radius; j <= radius; ++j)
            acc += kernel[static_cast<std::size_t>(j + radius)] * series[static_cast<std::size_t>(reflect(i + j))];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

/// Tie-aware rank AUC (anomaly = positive class).
inline double frame_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw data_error("frame_auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int l : labels) pos += (l != 0);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0)
        throw data_error("frame_auc: labels contain a single class, AUC undefined");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Average ranks over tied groups.
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double rank_sum_pos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k] != 0) rank_sum_pos += rank[k];
    const double p = static_cast<double>(pos);
    return (rank_sum_pos - p * (p + 1) / 2.0) / (p * static_cast<double>(neg));
}

/// Per-frame anomaly scores for one video with provenance.
struct ScoreSeries {
    std::string video_id;
    int first_scored = 0;          // frame index of the first prediction target
    int n_scored = 0;              // frames with real predictions
    std::vector<double> raw_psnr;  // length = video length (edges repeated)
    std::vector<double> normalized;
    std::vector<double> anomaly;   // 1 - smoothed normalized PSNR
    std::string padding = "edge-replicate";
    std::string mode = "pyramid";
    bool smoothed = true;
    double smooth_sigma = 3.0;
};

struct ScoringConfig {
    double lambda = 0.06;
    ScoreMode mode = ScoreMode::Pyramid;
    PyramidConfig pyramid;
    double plain_epsilon = 1e-8;
    double smooth_sigma = 3.0;
};

/// Score every frame of a preprocessed video with an arbitrary predictor
/// (anything mapping a stacked window to a PredictionPair).
template <class T, class Predictor>
ScoreSeries score_video(const std::vector<Tensor<T>>& frames, Predictor&& predict, int t,
                        int sigma, const ScoringConfig& cfg, const std::string& video_id = "") {
    const int length = static_cast<int>(frames.size());
    if (length < t + sigma)
        throw data_error("score_video: video " + video_id + " too short (" +
                         std::to_string(length) + " < " + std::to_string(t + sigma) + ")");
    cfg.pyramid.validate();
    const auto bases = window_base_indices(length, t, sigma, 1);
    ScoreSeries s;
    s.video_id = video_id;
    s.first_scored = bases.front() + 1;
    s.n_scored = static_cast<int>(bases.size());
    s.mode = score_mode_name(cfg.mode);
    s.smooth_sigma = cfg.smooth_sigma;

    std::vector<double> psnr;
    psnr.reserve(bases.size());
    for (int b : bases) {
        Tensor<T> x = stack_window_inputs(frames, b, t);
        PredictionPair<T> pair = predict(x);
        ErrorMap<T> e_i = error_map(pair.immediate, frames[static_cast<std::size_t>(b + 1)],
                                    Horizon::Immediate);
        ErrorMap<T> e_f = error_map(pair.forward, frames[static_cast<std::size_t>(b + sigma)],
                                    Horizon::Forward);
        ErrorMap<T> e = hybrid_error(e_i, e_f, cfg.lambda);
        psnr.push_back(cfg.mode == ScoreMode::Pyramid ? pyramid_psnr(e, cfg.pyramid)
                                                      : plain_psnr(e, cfg.plain_epsilon));
    }
    const std::vector<double> norm = normalize_scores(psnr);
    const std::vector<double> smooth = gaussian_smooth(norm, cfg.smooth_sigma);

    auto pad_full = [&](const std::vector<double>& v) {
        std::vector<double> full(static_cast<std::size_t>(length));
        for (int i = 0; i < length; ++i) {
            const int k = std::clamp(i - s.first_scored, 0, s.n_scored - 1);
            full[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(k)];
        }
        return full;
    };
    s.raw_psnr = pad_full(psnr);
    s.normalized = pad_full(norm);
    std::vector<double> anomaly(smooth.size());
    for (std::size_t i = 0; i < smooth.size(); ++i) anomaly[i] = 1.0 - smooth[i];
    s.anomaly = pad_full(anomaly);
    return s;
}

}  // namespace foga
