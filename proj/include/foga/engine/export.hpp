#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/scoring/scoring.hpp"
#include "foga/util/npy.hpp"

namespace foga {

/// Stable per-video CSV schema:
/// frame_index,raw_psnr,normalized,anomaly_score[,label]
inline void write_score_csv(const std::string& path, const ScoreSeries& s,
                            const std::vector<int>& labels = {}) {
    std::ofstream out(path);
    if (!out) throw runtime_failure("cannot write csv: " + path);
    const bool with_labels = !labels.empty();
    if (with_labels && labels.size() != s.anomaly.size())
        throw data_error("score csv: label length mismatch for " + s.video_id);
    out << "frame_index,raw_psnr,normalized,anomaly_score";
    if (with_labels) out << ",label";
    out << "\n";
    out << std::setprecision(10);
    for (std::size_t i = 0; i < s.anomaly.size(); ++i) {
        out << i << "," << s.raw_psnr[i] << "," << s.normalized[i] << "," << s.anomaly[i];
        if (with_labels) out << "," << labels[i];
        out << "\n";
    }
}

inline Tensor<float> error_map_tensor(const ErrorMap<float>& e) {
    Tensor<float> t(1, 1, e.h, e.w);
    std::copy(e.v.begin(), e.v.end(), t.data());
    return t;
}

/// Dump the three skip units' attention maps from the most recent forward
/// pass into a directory of NPY arrays.
template <class T>
void dump_attention_maps(const std::string& dir, const FogaNet<T>& net,
                         const std::string& tag) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto maps = net.attention_maps();
    for (std::size_t level = 0; level < maps.size(); ++level) {
        if (maps[level].gate.empty()) continue;  // EGA disabled
        const std::string base = dir + "/" + tag + "_level" + std::to_string(level);
        write_npy(base + "_channel.npy", maps[level].channel_map.template cast<float>());
        write_npy(base + "_spatial.npy", maps[level].spatial_map.template cast<float>());
        write_npy(base + "_gate.npy", maps[level].gate.template cast<float>());
    }
}

}  // namespace foga
