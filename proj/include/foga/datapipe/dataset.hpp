#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"
#include "foga/datapipe/image.hpp"
#include "foga/datapipe/image_io.hpp"

namespace foga {

enum class Split { Train, Test };

inline const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

/// One video: frames on disk (paths) or generated in memory, plus optional
/// per-frame binary labels on the test split.
struct VideoEntry {
    std::string id;
    std::vector<std::string> frame_paths;
    std::vector<ImageU8> frames_mem;
    std::vector<int> labels;  // empty on the train split

    int frame_count() const {
        return static_cast<int>(frames_mem.empty() ? frame_paths.size() : frames_mem.size());
    }
    bool in_memory() const { return !frames_mem.empty(); }

    ImageU8 frame(int i) const {
        if (in_memory()) return frames_mem[static_cast<std::size_t>(i)];
        return load_image(frame_paths[static_cast<std::size_t>(i)]);
    }
    std::string frame_origin(int i) const {
        if (in_memory()) return id + "[" + std::to_string(i) + "]";
        return frame_paths[static_cast<std::size_t>(i)];
    }
};

struct DatasetIndex {
    Split split = Split::Train;
    std::vector<VideoEntry> videos;

    int total_frames() const {
        int n = 0;
        for (const auto& v : videos) n += v.frame_count();
        return n;
    }
};

namespace detail {
inline bool is_frame_file(const std::filesystem::path& p) {
    static const char* exts[] = {".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"};
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const char* x : exts)
        if (e == x) return true;
    return false;
}
}  // namespace detail

/// Load a split from disk: one directory per video holding lexicographically
/// ordered image files; a test video may carry a labels.txt with one 0/1 line
/// per frame.
inline DatasetIndex load_dataset(const std::string& root, Split split) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(root) / split_name(split);
    if (!fs::is_directory(dir))
        throw data_error("dataset split directory not found: " + dir.string());
    DatasetIndex index;
    index.split = split;
    std::vector<fs::path> video_dirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) video_dirs.push_back(e.path());
    std::sort(video_dirs.begin(), video_dirs.end());
    for (const auto& vd : video_dirs) {
        VideoEntry v;
        v.id = vd.filename().string();
        std::vector<fs::path> frames;
        for (const auto& e : fs::directory_iterator(vd))
            if (e.is_regular_file() && detail::is_frame_file(e.path()))
                frames.push_back(e.path());
        std::sort(frames.begin(), frames.end());
        for (const auto& f : frames) v.frame_paths.push_back(f.string());
        if (v.frame_paths.empty())
            throw data_error("video directory has no frames: " + vd.string());
        if (split == Split::Test) {
            const fs::path lp = vd / "labels.txt";
            if (fs::exists(lp)) {
                std::ifstream in(lp);
                int val;
                while (in >> val) v.labels.push_back(val != 0 ? 1 : 0);
                if (static_cast<int>(v.labels.size()) != v.frame_count())
                    throw data_error("label count " + std::to_string(v.labels.size()) +
                                     " != frame count " + std::to_string(v.frame_count()) +
                                     " for video " + v.id);
            }
        }
        index.videos.push_back(std::move(v));
    }
    if (index.videos.empty()) throw data_error("no videos under " + dir.string());
    return index;
}

/// Write an index (typically a generated one) to disk in the layout above.
inline void write_dataset(const DatasetIndex& index, const std::string& root) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(root) / split_name(index.split);
    fs::create_directories(dir);
    for (const auto& v : index.videos) {
        const fs::path vdir = dir / v.id;
        fs::create_directories(vdir);
        for (int i = 0; i < v.frame_count(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%05d.png", i);
            save_image_png((vdir / name).string(), v.frame(i));
        }
        if (!v.labels.empty()) {
            std::ofstream out(vdir / "labels.txt");
            for (int l : v.labels) out << l << "\n";
        }
    }
}

/// Preprocessed sliding window: t stacked input frames plus the two targets.
template <class T>
struct FrameWindow {
    Tensor<T> inputs;            // (1, t*c_in, S, S)
    Tensor<T> target_immediate;  // (1, c_in, S, S), frame base_index + 1
    Tensor<T> target_forward;    // (1, c_in, S, S), frame base_index + sigma
    std::string video_id;
    int base_index = 0;  // 0-based index of the last input frame
};

/// 0-based base indices (last input frame) of every valid window.
inline std::vector<int> window_base_indices(int length, int t, int sigma, int stride) {
    if (t < 1 || sigma < 1) throw config_error("windows: t and sigma must be >= 1");
    if (stride < 1) throw config_error("windows: stride must be >= 1");
    std::vector<int> out;
    for (int b = t - 1; b + sigma <= length - 1; b += stride) out.push_back(b);
    return out;
}

/// Stack frames [b-t+1, b] channel-wise for base index b.
template <class T>
Tensor<T> stack_window_inputs(const std::vector<Tensor<T>>& frames, int base, int t) {
    const Tensor<T>& f0 = frames[static_cast<std::size_t>(base - t + 1)];
    Tensor<T> x(1, t * f0.c(), f0.h(), f0.w());
    const std::size_t seg = static_cast<std::size_t>(f0.c()) * f0.h() * f0.w();
    for (int k = 0; k < t; ++k) {
        const Tensor<T>& f = frames[static_cast<std::size_t>(base - t + 1 + k)];
        std::copy(f.data(), f.data() + seg, x.data() + seg * k);
    }
    return x;
}

/// Materialize every window of one preprocessed video.
template <class T>
std::vector<FrameWindow<T>> make_windows(const std::vector<Tensor<T>>& frames, int t,
                                         int sigma, int stride,
                                         const std::string& video_id = "") {
    const auto bases = window_base_indices(static_cast<int>(frames.size()), t, sigma, stride);
    std::vector<FrameWindow<T>> out;
    out.reserve(bases.size());
    for (int b : bases) {
        FrameWindow<T> w;
        w.inputs = stack_window_inputs(frames, b, t);
        w.target_immediate = frames[static_cast<std::size_t>(b + 1)];
        w.target_forward = frames[static_cast<std::size_t>(b + sigma)];
        w.video_id = video_id;
        w.base_index = b;
        out.push_back(std::move(w));
    }
    return out;
}

/// Decode and normalize every frame of a video once.
template <class T>
std::vector<Tensor<T>> preprocess_video(const VideoEntry& video, int c_in, int size) {
    std::vector<Tensor<T>> frames;
    frames.reserve(static_cast<std::size_t>(video.frame_count()));
    for (int i = 0; i < video.frame_count(); ++i)
        frames.push_back(preprocess_frame<T>(video.frame(i), c_in, size, video.frame_origin(i)));
    return frames;
}

}  // namespace foga
