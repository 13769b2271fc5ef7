#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "foga/model/config.hpp"
#include "foga/model/conv_block.hpp"
#include "foga/model/gcam.hpp"
#include "foga/nn/conv_transpose2d.hpp"
#include "foga/nn/pool.hpp"

namespace foga {

/// The two predicted frames from one forward pass.
template <class T>
struct PredictionPair {
    Tensor<T> immediate;  // \hat I_{t+1}
    Tensor<T> forward;    // \hat I_{t+sigma}
};

/// Symmetric encoder-decoder predictor with gated context aggregation on the
/// three skip connections and two tanh-bounded output heads.
template <class T>
class FogaNet {
public:
    FogaNet() = default;

    explicit FogaNet(const ModelConfig& cfg) : cfg_(cfg) {
        cfg.validate();
        const auto& cp = cfg.channel_plan;
        const int in_ch = cfg.t * cfg.c_in;
        enc_[0] = ConvBlock<T>(in_ch, cp[0], cfg.norm_groups);
        enc_[1] = ConvBlock<T>(cp[0], cp[1], cfg.norm_groups);
        enc_[2] = ConvBlock<T>(cp[1], cp[2], cfg.norm_groups);
        enc_[3] = ConvBlock<T>(cp[2], cp[3], cfg.norm_groups);
        up_[0] = ConvTranspose2d<T>(cp[3], cp[2]);
        up_[1] = ConvTranspose2d<T>(cp[2], cp[1]);
        up_[2] = ConvTranspose2d<T>(cp[1], cp[0]);
        dec_[0] = ConvBlock<T>(cp[2], cp[2], cfg.norm_groups);
        dec_[1] = ConvBlock<T>(cp[1], cp[1], cfg.norm_groups);
        dec_[2] = ConvBlock<T>(cp[0], cp[0], cfg.norm_groups);
        const int s = cfg.input_size;
        gcam_[0] = Gcam<T>(cp[2], s / 4, s / 4, cfg);  // fused at 1/4 scale
        gcam_[1] = Gcam<T>(cp[1], s / 2, s / 2, cfg);
        gcam_[2] = Gcam<T>(cp[0], s, s, cfg);
        head_immediate_ = Conv2d<T>(cp[0], cfg.c_in, 3, 1, 1);
        head_forward_ = Conv2d<T>(cp[0], cfg.c_in, 3, 1, 1);
    }

    void init_weights(std::uint64_t seed) {
        Rng rng(seed);
        for (auto& e : enc_) e.init_weights(rng);
        for (auto& u : up_) u.init_weights(rng);
        for (auto& g : gcam_) g.init_weights(rng);
        for (auto& d : dec_) d.init_weights(rng);
        head_immediate_.init_weights(rng);
        head_forward_.init_weights(rng);
    }

    const ModelConfig& config() const { return cfg_; }

    /// Four pyramid levels at full, 1/2, 1/4 and 1/8 resolution.
    std::array<Tensor<T>, 4> encode(const Tensor<T>& x, bool train = true) {
        check_input(x);
        std::array<Tensor<T>, 4> f;
        f[0] = enc_[0].forward(x, train);
        f[1] = enc_[1].forward(pool_[0].forward(f[0], train), train);
        f[2] = enc_[2].forward(pool_[1].forward(f[1], train), train);
        f[3] = enc_[3].forward(pool_[2].forward(f[2], train), train);
        return f;
    }

    /// Decode back to full resolution through the skip units.
    Tensor<T> decode(const std::array<Tensor<T>, 4>& f, bool train = true) {
        Tensor<T> y = dec_[0].forward(gcam_[0].forward(f[2], up_[0].forward(f[3], train), train), train);
        y = dec_[1].forward(gcam_[1].forward(f[1], up_[1].forward(y, train), train), train);
        y = dec_[2].forward(gcam_[2].forward(f[0], up_[2].forward(y, train), train), train);
        return y;
    }

    PredictionPair<T> forward(const Tensor<T>& x, bool train = true) {
        auto levels = encode(x, train);
        Tensor<T> y = decode(levels, train);
        PredictionPair<T> out;
        out.immediate = act_immediate_.forward(head_immediate_.forward(y, train), train);
        out.forward = act_forward_.forward(head_forward_.forward(y, train), train);
        return out;
    }

    /// Accumulates parameter grads from both head grads; returns input grad.
    Tensor<T> backward(const Tensor<T>& g_immediate, const Tensor<T>& g_forward) {
        Tensor<T> gy = head_immediate_.backward(act_immediate_.backward(g_immediate));
        gy += head_forward_.backward(act_forward_.backward(g_forward));
        auto [gf0, gg0] = gcam_[2].backward(dec_[2].backward(gy));
        Tensor<T> g = up_[2].backward(gg0);
        auto [gf1, gg1] = gcam_[1].backward(dec_[1].backward(g));
        g = up_[1].backward(gg1);
        auto [gf2, gg2] = gcam_[0].backward(dec_[0].backward(g));
        Tensor<T> gf3 = up_[0].backward(gg2);
        gf2 += pool_[2].backward(enc_[3].backward(gf3));
        gf1 += pool_[1].backward(enc_[2].backward(gf2));
        gf0 += pool_[0].backward(enc_[1].backward(gf1));
        return enc_[0].backward(gf0);
    }

    void collect(ParamList<T>& out) {
        static const char* enames[4] = {"enc1", "enc2", "enc3", "enc4"};
        static const char* unames[3] = {"up3", "up2", "up1"};
        static const char* gnames[3] = {"gcam3", "gcam2", "gcam1"};
        static const char* dnames[3] = {"dec3", "dec2", "dec1"};
        for (int i = 0; i < 4; ++i) enc_[i].collect(out, enames[i]);
        for (int i = 0; i < 3; ++i) {
            up_[i].collect(out, unames[i]);
            gcam_[i].collect(out, gnames[i]);
            dec_[i].collect(out, dnames[i]);
        }
        head_immediate_.collect(out, "head_immediate");
        head_forward_.collect(out, "head_forward");
    }

    ParamList<T> parameters() {
        ParamList<T> out;
        collect(out);
        return out;
    }

    std::size_t param_count() {
        return total_param_count<T>(parameters());
    }

    /// Analytic multiply-accumulate count x2 for one sample, convolution-type
    /// layers only (convolutions, transposed convolutions, attention convs).
    double estimate_flops(int input_size) const {
        const int s0 = input_size, s1 = s0 / 2, s2 = s0 / 4, s3 = s0 / 8;
        double macs = 0;
        macs += enc_[0].macs(s0, s0);
        macs += enc_[1].macs(s1, s1);
        macs += enc_[2].macs(s2, s2);
        macs += enc_[3].macs(s3, s3);
        macs += up_[0].macs(s3, s3) + gcam_[0].macs(s2, s2) + dec_[0].macs(s2, s2);
        macs += up_[1].macs(s2, s2) + gcam_[1].macs(s1, s1) + dec_[1].macs(s1, s1);
        macs += up_[2].macs(s1, s1) + gcam_[2].macs(s0, s0) + dec_[2].macs(s0, s0);
        macs += head_immediate_.macs(s0, s0) + head_forward_.macs(s0, s0);
        return 2.0 * macs;
    }
    double estimate_flops() const { return estimate_flops(cfg_.input_size); }

    std::array<AttentionMaps<T>, 3> attention_maps() const {
        // Ordered from the coarsest (1/4 scale) to the full-resolution skip.
        return {gcam_[0].attention_maps(), gcam_[1].attention_maps(),
                gcam_[2].attention_maps()};
    }

    Gcam<T>& gcam(int i) { return gcam_[i]; }
    ConvBlock<T>& encoder_block(int i) { return enc_[i]; }

private:
    void check_input(const Tensor<T>& x) const {
        if (x.c() != cfg_.t * cfg_.c_in)
            throw config_error("model: window has " + std::to_string(x.c()) +
                               " channels, config expects " +
                               std::to_string(cfg_.t * cfg_.c_in));
        if (x.h() != cfg_.input_size || x.w() != cfg_.input_size)
            throw config_error("model: input " + x.shape_str() + " does not match input_size " +
                               std::to_string(cfg_.input_size));
        if (x.h() % 8 != 0 || x.w() % 8 != 0)
            throw config_error("model: spatial size must be divisible by 8");
    }

    ModelConfig cfg_;
    std::array<ConvBlock<T>, 4> enc_;
    std::array<MaxPool2d<T>, 3> pool_;
    std::array<ConvTranspose2d<T>, 3> up_;
    std::array<Gcam<T>, 3> gcam_;
    std::array<ConvBlock<T>, 3> dec_;
    Conv2d<T> head_immediate_, head_forward_;
    Tanh<T> act_immediate_, act_forward_;
};

/// Exact trainable-parameter count for a configuration.
inline std::size_t count_params(const ModelConfig& cfg) {
    FogaNet<float> net(cfg);
    return net.param_count();
}

/// Analytic FLOP estimate (multiply-accumulate count x2) at a given square
/// input size.
inline double estimate_flops(const ModelConfig& cfg, int input_size) {
    ModelConfig c = cfg;
    c.input_size = input_size;  // attention kernels derive from resolution
    FogaNet<float> net(c);
    return net.estimate_flops(input_size);
}

}  // namespace foga
