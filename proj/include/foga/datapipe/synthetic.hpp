#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/rng.hpp"
#include "foga/datapipe/dataset.hpp"

namespace foga {

enum class AnomalyType { Teleport, Speed, DirectionFlip };

inline AnomalyType anomaly_type_from_string(const std::string& s) {
    if (s == "teleport") return AnomalyType::Teleport;
    if (s == "speed") return AnomalyType::Speed;
    if (s == "flip" || s == "direction_flip") return AnomalyType::DirectionFlip;
    throw config_error("unknown anomaly type: " + s);
}

inline std::string anomaly_type_name(AnomalyType t) {
    switch (t) {
        case AnomalyType::Teleport: return "teleport";
        case AnomalyType::Speed: return "speed";
        default: return "flip";
    }
}

/// Desk-scale benchmark substitute: videos of smoothly moving shapes, with
/// labeled anomaly intervals injected into the test split.
struct SyntheticSpec {
    int num_train_videos = 20;
    int num_test_videos = 8;
    int frames_per_video = 100;
    int height = 64;
    int width = 64;
    int shapes_min = 2;
    int shapes_max = 3;
    double size_min = 5.0;
    double size_max = 9.0;
    double vel_min = 0.6;
    double vel_max = 1.8;
    std::vector<std::string> anomaly_types = {"teleport", "speed"};
    int anomalies_per_video = 1;
    int interval_min = 15;
    int interval_max = 25;
    double teleport_jitter = 18.0;
    double speed_factor = 3.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_train_videos < 0 || num_test_videos < 0)
            throw config_error("synthetic: negative video count");
        if (frames_per_video < 1) throw config_error("synthetic: frames_per_video must be >= 1");
        if (height < 8 || width < 8) throw config_error("synthetic: frame size too small");
        if (shapes_min < 1 || shapes_max < shapes_min)
            throw config_error("synthetic: bad shape count range");
        if (size_min <= 0 || size_max < size_min)
            throw config_error("synthetic: bad size range");
        if (vel_min < 0 || vel_max < vel_min) throw config_error("synthetic: bad velocity range");
        if (interval_min < 1 || interval_max < interval_min)
            throw config_error("synthetic: bad interval range");
        if (anomalies_per_video > 0 && interval_max > frames_per_video)
            throw config_error("synthetic: anomaly interval longer than video");
        for (const auto& t : anomaly_types) anomaly_type_from_string(t);
        if (anomalies_per_video > 0 && anomaly_types.empty())
            throw config_error("synthetic: anomalies requested but no types given");
    }
};

namespace detail {

struct Shape {
    bool circle = true;
    double size = 6.0;  // radius, or half extent for squares
    double x = 0, y = 0;
    double vx = 0, vy = 0;
    std::uint8_t rgb[3] = {255, 255, 255};
};

struct AnomalyInterval {
    int start = 0, length = 0;
    int shape = 0;
    AnomalyType type = AnomalyType::Teleport;
};

inline void bounce(Shape& s, double h, double w) {
    if (s.x - s.size < 0) { s.x = s.size; s.vx = std::abs(s.vx); }
    if (s.x + s.size > w - 1) { s.x = w - 1 - s.size; s.vx = -std::abs(s.vx); }
    if (s.y - s.size < 0) { s.y = s.size; s.vy = std::abs(s.vy); }
    if (s.y + s.size > h - 1) { s.y = h - 1 - s.size; s.vy = -std::abs(s.vy); }
}

inline void draw_shape(ImageU8& img, const Shape& s, double draw_x, double draw_y) {
    const int y0 = std::max(0, static_cast<int>(std::floor(draw_y - s.size - 1)));
    const int y1 = std::min(img.h - 1, static_cast<int>(std::ceil(draw_y + s.size + 1)));
    const int x0 = std::max(0, static_cast<int>(std::floor(draw_x - s.size - 1)));
    const int x1 = std::min(img.w - 1, static_cast<int>(std::ceil(draw_x + s.size + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double alpha;
            if (s.circle) {
                const double d = std::hypot(x - draw_x, y - draw_y);
                alpha = std::clamp(s.size + 0.5 - d, 0.0, 1.0);
            } else {
                const double ox = std::clamp(std::min(draw_x + s.size, x + 0.5) -
                                                 std::max(draw_x - s.size, x - 0.5),
                                             0.0, 1.0);
                const double oy = std::clamp(std::min(draw_y + s.size, y + 0.5) -
                                                 std::max(draw_y - s.size, y - 0.5),
                                             0.0, 1.0);
                alpha = ox * oy;
            }
            if (alpha <= 0) continue;
            for (int c = 0; c < 3; ++c) {
                const double v = (1.0 - alpha) * img.at(y, x, c) + alpha * s.rgb[c];
                img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1) + 0x517cc1b727220a95ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline VideoEntry synth_video(const SyntheticSpec& spec, std::uint64_t video_seed,
                              const std::string& id, bool with_anomalies) {
    Rng rng(video_seed);
    const int n_shapes = static_cast<int>(rng.uniform_int(spec.shapes_min, spec.shapes_max));
    std::vector<Shape> shapes(static_cast<std::size_t>(n_shapes));
    static const std::uint8_t palette[6][3] = {{235, 80, 70},  {70, 200, 90},  {90, 120, 240},
                                               {240, 200, 60}, {200, 90, 220}, {70, 220, 210}};
    for (int k = 0; k < n_shapes; ++k) {
        Shape& s = shapes[static_cast<std::size_t>(k)];
        s.circle = rng.uniform() < 0.5;
        s.size = rng.uniform(spec.size_min, spec.size_max);
        s.x = rng.uniform(s.size + 1, spec.width - 2 - s.size);
        s.y = rng.uniform(s.size + 1, spec.height - 2 - s.size);
        const double speed = rng.uniform(spec.vel_min, spec.vel_max);
        const double angle = rng.uniform(0.0, 6.283185307179586);
        s.vx = speed * std::cos(angle);
        s.vy = speed * std::sin(angle);
        const auto& col = palette[rng.uniform_int(0, 5)];
        s.rgb[0] = col[0]; s.rgb[1] = col[1]; s.rgb[2] = col[2];
    }

    std::vector<AnomalyInterval> intervals;
    if (with_anomalies && spec.anomalies_per_video > 0) {
        // Non-overlapping intervals, kept clear of the first frames so every
        // anomaly falls inside the scored region.
        int cursor = std::min(10, spec.frames_per_video / 4);
        for (int a = 0; a < spec.anomalies_per_video; ++a) {
            const int len =
                static_cast<int>(rng.uniform_int(spec.interval_min, spec.interval_max));
            const int last_start = spec.frames_per_video - len;
            if (cursor > last_start) break;
            AnomalyInterval iv;
            iv.start = static_cast<int>(rng.uniform_int(cursor, last_start));
            iv.length = len;
            iv.shape = static_cast<int>(rng.uniform_int(0, n_shapes - 1));
            iv.type = anomaly_type_from_string(
                spec.anomaly_types[static_cast<std::size_t>(rng.uniform_int(
                    0, static_cast<std::int64_t>(spec.anomaly_types.size()) - 1))]);
            intervals.push_back(iv);
            cursor = iv.start + iv.length + 5;
        }
    }

    VideoEntry video;
    video.id = id;
    video.frames_mem.reserve(static_cast<std::size_t>(spec.frames_per_video));
    if (with_anomalies) video.labels.assign(static_cast<std::size_t>(spec.frames_per_video), 0);

    for (int f = 0; f < spec.frames_per_video; ++f) {
        const AnomalyInterval* active = nullptr;
        for (const auto& iv : intervals)
            if (f >= iv.start && f < iv.start + iv.length) active = &iv;

        ImageU8 img;
        img.h = spec.height;
        img.w = spec.width;
        img.channels = 3;
        img.data.assign(static_cast<std::size_t>(img.h) * img.w * 3, 0);
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x) {
                img.at(y, x, 0) = 30;
                img.at(y, x, 1) = 30;
                img.at(y, x, 2) = 34;
            }

        for (int k = 0; k < n_shapes; ++k) {
            Shape& s = shapes[static_cast<std::size_t>(k)];
            double draw_x = s.x, draw_y = s.y;
            if (active && active->shape == k && active->type == AnomalyType::Teleport) {
                draw_x = std::clamp(s.x + rng.uniform(-spec.teleport_jitter, spec.teleport_jitter),
                                    s.size, spec.width - 1 - s.size);
                draw_y = std::clamp(s.y + rng.uniform(-spec.teleport_jitter, spec.teleport_jitter),
                                    s.size, spec.height - 1 - s.size);
            }
            draw_shape(img, s, draw_x, draw_y);
        }
        video.frames_mem.push_back(std::move(img));
        if (active && !video.labels.empty()) video.labels[static_cast<std::size_t>(f)] = 1;

        // Advance the scene to the next frame.
        for (int k = 0; k < n_shapes; ++k) {
            Shape& s = shapes[static_cast<std::size_t>(k)];
            double mul = 1.0;
            if (active && active->shape == k) {
                if (active->type == AnomalyType::Speed) mul = spec.speed_factor;
                if (active->type == AnomalyType::DirectionFlip) mul = (f % 2 == 0) ? -1.0 : 1.0;
            }
            s.x += s.vx * mul;
            s.y += s.vy * mul;
            bounce(s, spec.height, spec.width);
        }
    }
    return video;
}

}  // namespace detail

/// Deterministic generator: train videos contain only normal motion, test
/// videos carry labeled anomaly intervals.
inline std::pair<DatasetIndex, DatasetIndex> synth_generate(const SyntheticSpec& spec) {
    spec.validate();
    DatasetIndex train, test;
    train.split = Split::Train;
    test.split = Split::Test;
    char buf[32];
    for (int i = 0; i < spec.num_train_videos; ++i) {
        std::snprintf(buf, sizeof(buf), "video_%03d", i);
        train.videos.push_back(
            detail::synth_video(spec, detail::mix_seed(spec.seed, 1, i), buf, false));
    }
    for (int i = 0; i < spec.num_test_videos; ++i) {
        std::snprintf(buf, sizeof(buf), "video_%03d", i);
        test.videos.push_back(
            detail::synth_video(spec, detail::mix_seed(spec.seed, 2, i), buf, true));
    }
    return {std::move(train), std::move(test)};
}

}  // namespace foga
