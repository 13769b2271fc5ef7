#pragma once

#include <array>
#include <cmath>
#include <string>

#include "foga/core/errors.hpp"

namespace foga {

/// Architecture hyperparameters. The default plan reproduces the published
/// parameter budget at 224x224.
struct ModelConfig {
    int t = 4;               // input frame count
    int sigma = 4;           // forward horizon
    int c_in = 3;            // channels per frame
    int input_size = 224;    // square input resolution
    std::array<int, 4> channel_plan = {32, 64, 128, 256};
    bool use_cfa = true;
    bool use_ega = true;
    int cfa_reduction = 8;   // branch width = C / r
    int eca_b = 1;
    int eca_gamma = 2;
    int norm_groups = 8;
    std::string activation = "relu";  // fixed across ablations
    bool attention_bias = false;      // ECA/ESA convs carry no bias

    void validate() const {
        if (t < 1) throw config_error("model: t must be >= 1");
        if (sigma < 1) throw config_error("model: sigma must be >= 1");
        if (c_in < 1) throw config_error("model: c_in must be >= 1");
        if (input_size < 8 || input_size % 8 != 0)
            throw config_error("model: input_size must be a positive multiple of 8");
        for (std::size_t i = 1; i < channel_plan.size(); ++i)
            if (channel_plan[i] <= channel_plan[i - 1])
                throw config_error("model: channel_plan must be strictly increasing");
        for (int c : channel_plan) {
            if (c % norm_groups != 0)
                throw config_error("model: channel_plan entries must divide by norm_groups");
        }
        for (std::size_t i = 0; i + 1 < channel_plan.size(); ++i)
            if (channel_plan[i] % cfa_reduction != 0)
                throw config_error("model: skip widths must divide by cfa_reduction");
        if (activation != "relu")
            throw config_error("model: unsupported activation '" + activation + "'");
    }

    bool operator==(const ModelConfig&) const = default;
};

/// odd() used by both attention kernel rules: floor, then bump to odd.
inline int nearest_odd_floor(double x) {
    int f = static_cast<int>(std::floor(x));
    if (f % 2 == 0) ++f;
    return f;
}

/// Channel-attention kernel: odd((log2 C + b) / gamma), at least 1.
inline int eca_kernel_size(int channels, int b = 1, int gamma = 2) {
    if (channels < 1) throw config_error("eca_kernel_size: channels must be >= 1");
    const double v = (std::log2(static_cast<double>(channels)) + b) / gamma;
    const int k = nearest_odd_floor(v);
    return k < 1 ? 1 : k;
}

/// Spatial-attention kernel: same rule over log2(H*W), clamped to >= 3.
inline int esa_kernel_size(int h, int w, int b = 1, int gamma = 2) {
    if (h < 1 || w < 1) throw config_error("esa_kernel_size: H, W must be >= 1");
    const double v =
        (std::log2(static_cast<double>(h) * static_cast<double>(w)) + b) / gamma;
    const int k = nearest_odd_floor(v);
    return k < 3 ? 3 : k;
}

}  // namespace foga
