#pragma once

#include <string>
#include <utility>
#include <vector>

#include "foga/model/config.hpp"
#include "foga/nn/activations.hpp"
#include "foga/nn/conv2d.hpp"
#include "foga/nn/param.hpp"
#include "foga/nn/pool.hpp"

namespace foga {

/// Context feature aggregation: five parallel branches over f_e + f_d
/// (1x1, 3x3, 5x5, and 3x3 dilated at rates 3 and 5), each C -> C/r,
/// concatenated and fused back to C by a 1x1 convolution.
template <class T>
class Cfa {
public:
    Cfa() = default;
    Cfa(int channels, int reduction) : channels_(channels) {
        const int bw = channels / reduction;
        branches_.emplace_back(channels, bw, 1, 1, 0, 1);
        branches_.emplace_back(channels, bw, 3, 1, 1, 1);
        branches_.emplace_back(channels, bw, 5, 1, 2, 1);
        branches_.emplace_back(channels, bw, 3, 1, 3, 3);
        branches_.emplace_back(channels, bw, 3, 1, 5, 5);
        fuse_ = Conv2d<T>(5 * bw, channels, 1, 1, 0, 1);
    }

    void init_weights(Rng& rng) {
        for (auto& b : branches_) b.init_weights(rng);
        fuse_.init_weights(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        const int bw = branches_[0].out_channels();
        Tensor<T> cat(x.n(), 5 * bw, x.h(), x.w());
        const std::size_t seg = static_cast<std::size_t>(bw) * x.h() * x.w();
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            Tensor<T> y = branches_[k].forward(x, train);
            for (int n = 0; n < x.n(); ++n)
                std::copy(y.plane(n, 0), y.plane(n, 0) + seg,
                          cat.plane(n, static_cast<int>(k) * bw));
        }
        return fuse_.forward(cat, train);
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gcat = fuse_.backward(gy);
        const int bw = branches_[0].out_channels();
        const std::size_t seg = static_cast<std::size_t>(bw) * gcat.h() * gcat.w();
        Tensor<T> gx;
        for (std::size_t k = 0; k < branches_.size(); ++k) {
            Tensor<T> gseg(gcat.n(), bw, gcat.h(), gcat.w());
            for (int n = 0; n < gcat.n(); ++n)
                std::copy(gcat.plane(n, static_cast<int>(k) * bw),
                          gcat.plane(n, static_cast<int>(k) * bw) + seg, gseg.plane(n, 0));
            Tensor<T> g = branches_[k].backward(gseg);
            if (k == 0) gx = std::move(g); else gx += g;
        }
        return gx;
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        static const char* names[5] = {"b1x1", "b3x3", "b5x5", "b3x3d3", "b3x3d5"};
        for (std::size_t k = 0; k < branches_.size(); ++k)
            branches_[k].collect(out, prefix + "." + names[k]);
        fuse_.collect(out, prefix + ".fuse");
    }

    std::size_t param_count() const {
        std::size_t n = fuse_.param_count();
        for (const auto& b : branches_) n += b.param_count();
        return n;
    }

    double macs(int h, int w) const {
        double m = fuse_.macs(h, w);
        for (const auto& b : branches_) m += b.macs(h, w);
        return m;
    }

private:
    int channels_ = 0;
    std::vector<Conv2d<T>> branches_;
    Conv2d<T> fuse_;
};

/// Efficient channel attention: global average pool, a zero-padded 1-D
/// convolution across channels with an adaptively sized kernel, sigmoid,
/// then channel-wise rescaling of the input.
template <class T>
class Eca {
public:
    Eca() = default;
    explicit Eca(int channels, int b = 1, int gamma = 2)
        : channels_(channels), k_(eca_kernel_size(channels, b, gamma)) {
        weight_.init(k_, 1, 1, 1);
    }

    void init_weights(Rng& rng) {
        const double bound = std::sqrt(6.0 / k_);
        weight_.value.fill_uniform(rng, static_cast<T>(-bound), static_cast<T>(bound));
    }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        pooled_ = global_avg_pool(x);
        Tensor<T> m(x.n(), channels_, 1, 1);
        const int off = (k_ - 1) / 2;
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < channels_; ++c) {
                T s = T(0);
                for (int j = 0; j < k_; ++j) {
                    const int cc = c + j - off;
                    if (cc >= 0 && cc < channels_)
                        s += weight_.value[j] * pooled_.at(n, cc, 0, 0);
                }
                m.at(n, c, 0, 0) = T(1) / (T(1) + std::exp(-s));
            }
        }
        scale_ = m;
        Tensor<T> y = Tensor<T>::zeros_like(x);
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < channels_; ++c) {
                const T s = m.at(n, c, 0, 0);
                const T* src = x.plane(n, c);
                T* dst = y.plane(n, c);
                for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * s;
            }
        }
        if (train) x_cache_ = x; else x_cache_ = Tensor<T>();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        const Tensor<T>& x = x_cache_;
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        const int off = (k_ - 1) / 2;
        Tensor<T> gx = Tensor<T>::zeros_like(x);
        Tensor<T> gm(x.n(), channels_, 1, 1);
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < channels_; ++c) {
                const T s = scale_.at(n, c, 0, 0);
                const T* g = gy.plane(n, c);
                const T* src = x.plane(n, c);
                T* dst = gx.plane(n, c);
                T gs = T(0);
                for (std::size_t i = 0; i < plane; ++i) {
                    dst[i] = g[i] * s;
                    gs += g[i] * src[i];
                }
                gm.at(n, c, 0, 0) = gs * s * (T(1) - s);  // through sigmoid
            }
        }
        // Through the 1-D conv: weight grad and pooled-feature grad.
        Tensor<T> gpool(x.n(), channels_, 1, 1);
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < channels_; ++c) {
                const T g = gm.at(n, c, 0, 0);
                for (int j = 0; j < k_; ++j) {
                    const int cc = c + j - off;
                    if (cc >= 0 && cc < channels_) {
                        weight_.grad[j] += g * pooled_.at(n, cc, 0, 0);
                        gpool.at(n, cc, 0, 0) += g * weight_.value[j];
                    }
                }
            }
        }
        // Through global average pooling.
        const T inv = T(1) / static_cast<T>(plane);
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < channels_; ++c) {
                const T g = gpool.at(n, c, 0, 0) * inv;
                T* dst = gx.plane(n, c);
                for (std::size_t i = 0; i < plane; ++i) dst[i] += g;
            }
        }
        return gx;
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        out.push_back({prefix + ".weight", &weight_});
    }
    std::size_t param_count() const { return weight_.size(); }
    /// One pass of the channel conv per sample.
    double macs(int, int) const { return static_cast<double>(k_) * channels_; }

    int kernel() const { return k_; }
    const Tensor<T>& channel_map() const { return scale_; }

private:
    int channels_ = 0, k_ = 3;
    Parameter<T> weight_;
    Tensor<T> x_cache_, pooled_, scale_;
};

/// Efficient spatial attention: channel mean, a size-preserving k x k
/// convolution with resolution-derived kernel, sigmoid, spatial rescaling.
template <class T>
class Esa {
public:
    Esa() = default;
    Esa(int h, int w, int b = 1, int gamma = 2) : k_(esa_kernel_size(h, w, b, gamma)) {
        conv_ = Conv2d<T>(1, 1, k_, 1, (k_ - 1) / 2, 1, /*bias=*/false);
    }

    void init_weights(Rng& rng) { conv_.init_weights(rng); }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        Tensor<T> f = channel_mean(x);
        map_ = sig_.forward(conv_.forward(f, train), train);
        Tensor<T> y = Tensor<T>::zeros_like(x);
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        for (int n = 0; n < x.n(); ++n) {
            const T* m = map_.plane(n, 0);
            for (int c = 0; c < x.c(); ++c) {
                const T* src = x.plane(n, c);
                T* dst = y.plane(n, c);
                for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * m[i];
            }
        }
        if (train) x_cache_ = x; else x_cache_ = Tensor<T>();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        const Tensor<T>& x = x_cache_;
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        Tensor<T> gx = Tensor<T>::zeros_like(x);
        Tensor<T> gmap(x.n(), 1, x.h(), x.w());
        for (int n = 0; n < x.n(); ++n) {
            const T* m = map_.plane(n, 0);
            T* gmp = gmap.plane(n, 0);
            for (int c = 0; c < x.c(); ++c) {
                const T* g = gy.plane(n, c);
                const T* src = x.plane(n, c);
                T* dst = gx.plane(n, c);
                for (std::size_t i = 0; i < plane; ++i) {
                    dst[i] = g[i] * m[i];
                    gmp[i] += g[i] * src[i];
                }
            }
        }
        Tensor<T> gf = conv_.backward(sig_.backward(gmap));
        // Through the channel mean.
        const T inv = T(1) / static_cast<T>(x.c());
        for (int n = 0; n < x.n(); ++n) {
            const T* g = gf.plane(n, 0);
            for (int c = 0; c < x.c(); ++c) {
                T* dst = gx.plane(n, c);
                for (std::size_t i = 0; i < plane; ++i) dst[i] += g[i] * inv;
            }
        }
        return gx;
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        conv_.collect(out, prefix + ".conv");
    }
    std::size_t param_count() const { return conv_.param_count(); }
    double macs(int h, int w) const { return conv_.macs(h, w); }

    int kernel() const { return k_; }
    const Tensor<T>& spatial_map() const { return map_; }

private:
    int k_ = 3;
    Conv2d<T> conv_;
    Sigmoid<T> sig_;
    Tensor<T> x_cache_, map_;
};

/// Gated fusion: g = sigmoid(conv1x1(concat[F_c, F_s])), out = g * (F_c + F_s).
template <class T>
class GateFuse {
public:
    GateFuse() = default;
    explicit GateFuse(int channels)
        : channels_(channels), conv_(2 * channels, channels, 1, 1, 0, 1) {}

    void init_weights(Rng& rng) { conv_.init_weights(rng); }

    Tensor<T> forward(const Tensor<T>& fc, const Tensor<T>& fs, bool train = true) {
        Tensor<T> cat = concat_channels(fc, fs);
        gate_ = sig_.forward(conv_.forward(cat, train), train);
        sum_ = fc + fs;
        Tensor<T> y = Tensor<T>::zeros_like(sum_);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = gate_[i] * sum_[i];
        return y;
    }

    std::pair<Tensor<T>, Tensor<T>> backward(const Tensor<T>& gy) {
        Tensor<T> ggate = Tensor<T>::zeros_like(gy);
        Tensor<T> gsum = Tensor<T>::zeros_like(gy);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            ggate[i] = gy[i] * sum_[i];
            gsum[i] = gy[i] * gate_[i];
        }
        Tensor<T> gcat = conv_.backward(sig_.backward(ggate));
        Tensor<T> gfc, gfs;
        split_channels(gcat, channels_, gfc, gfs);
        gfc += gsum;
        gfs += gsum;
        return {std::move(gfc), std::move(gfs)};
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        conv_.collect(out, prefix + ".conv");
    }
    std::size_t param_count() const { return conv_.param_count(); }
    double macs(int h, int w) const { return conv_.macs(h, w); }

    const Tensor<T>& gate_map() const { return gate_; }

private:
    int channels_ = 0;
    Conv2d<T> conv_;
    Sigmoid<T> sig_;
    Tensor<T> gate_, sum_;
};

/// Raw attention maps captured from one forward pass, for export.
template <class T>
struct AttentionMaps {
    Tensor<T> channel_map;  // (N, C, 1, 1)
    Tensor<T> spatial_map;  // (N, 1, H, W)
    Tensor<T> gate;         // (N, C, H, W)
};

/// One skip-connection unit: CFA context fusion followed by efficient gated
/// attention. Either stage can be toggled off; with both off the unit is the
/// plain element-wise sum of its inputs.
template <class T>
class Gcam {
public:
    Gcam() = default;
    Gcam(int channels, int h, int w, const ModelConfig& cfg)
        : channels_(channels), use_cfa_(cfg.use_cfa), use_ega_(cfg.use_ega) {
        if (use_cfa_) cfa_ = Cfa<T>(channels, cfg.cfa_reduction);
        if (use_ega_) {
            eca_ = Eca<T>(channels, cfg.eca_b, cfg.eca_gamma);
            esa_ = Esa<T>(h, w, cfg.eca_b, cfg.eca_gamma);
            gate_ = GateFuse<T>(channels);
        }
    }

    void init_weights(Rng& rng) {
        if (use_cfa_) cfa_.init_weights(rng);
        if (use_ega_) {
            eca_.init_weights(rng);
            esa_.init_weights(rng);
            gate_.init_weights(rng);
        }
    }

    Tensor<T> forward(const Tensor<T>& f_e, const Tensor<T>& f_d, bool train = true) {
        if (!f_e.same_shape(f_d))
            throw config_error("gcam: encoder/decoder feature shape mismatch " +
                               f_e.shape_str() + " vs " + f_d.shape_str());
        Tensor<T> x = f_e + f_d;
        if (use_cfa_) x = cfa_.forward(x, train);
        if (!use_ega_) return x;
        Tensor<T> fc = eca_.forward(x, train);
        Tensor<T> fs = esa_.forward(x, train);
        return gate_.forward(fc, fs, train);
    }

    /// Returns (grad f_e, grad f_d); the two are equal since the unit reads
    /// their sum.
    std::pair<Tensor<T>, Tensor<T>> backward(const Tensor<T>& gy) {
        Tensor<T> gx;
        if (use_ega_) {
            auto [gfc, gfs] = gate_.backward(gy);
            gx = eca_.backward(gfc);
            gx += esa_.backward(gfs);
        } else {
            gx = gy;
        }
        if (use_cfa_) gx = cfa_.backward(gx);
        return {gx, gx};
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        if (use_cfa_) cfa_.collect(out, prefix + ".cfa");
        if (use_ega_) {
            eca_.collect(out, prefix + ".eca");
            esa_.collect(out, prefix + ".esa");
            gate_.collect(out, prefix + ".gate");
        }
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        if (use_cfa_) n += cfa_.param_count();
        if (use_ega_) n += eca_.param_count() + esa_.param_count() + gate_.param_count();
        return n;
    }

    double macs(int h, int w) const {
        double m = 0;
        if (use_cfa_) m += cfa_.macs(h, w);
        if (use_ega_) m += eca_.macs(h, w) + esa_.macs(h, w) + gate_.macs(h, w);
        return m;
    }

    AttentionMaps<T> attention_maps() const {
        AttentionMaps<T> maps;
        if (use_ega_) {
            maps.channel_map = eca_.channel_map();
            maps.spatial_map = esa_.spatial_map();
            maps.gate = gate_.gate_map();
        }
        return maps;
    }

    bool has_ega() const { return use_ega_; }
    Cfa<T>& cfa() { return cfa_; }
    Eca<T>& eca() { return eca_; }
    Esa<T>& esa() { return esa_; }
    GateFuse<T>& gate() { return gate_; }

private:
    int channels_ = 0;
    bool use_cfa_ = true, use_ega_ = true;
    Cfa<T> cfa_;
    Eca<T> eca_;
    Esa<T> esa_;
    GateFuse<T> gate_;
};

}  // namespace foga
