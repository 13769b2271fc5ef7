#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "foga/core/blas.hpp"
#include "foga/core/errors.hpp"
#include "foga/core/im2col.hpp"
#include "foga/core/tensor.hpp"
#include "foga/nn/param.hpp"

namespace foga {

/// 2-D convolution, weight layout (out_ch, in_ch, kh, kw).
template <class T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(int in_ch, int out_ch, int kernel, int stride = 1, int pad = 0,
           int dilation = 1, bool bias = true)
        : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride), pad_(pad),
          dilation_(dilation), has_bias_(bias) {
        weight_.init(out_ch, in_ch, kernel, kernel);
        if (bias) bias_.init(out_ch, 1, 1, 1);
    }

    void init_weights(Rng& rng) {
        // Kaiming-uniform, fan_in = in_ch * k * k.
        const double fan_in = static_cast<double>(in_ch_) * k_ * k_;
        const double bound = std::sqrt(6.0 / fan_in);
        weight_.value.fill_uniform(rng, static_cast<T>(-bound), static_cast<T>(bound));
        if (has_bias_) {
            const double bb = 1.0 / std::sqrt(fan_in);
            bias_.value.fill_uniform(rng, static_cast<T>(-bb), static_cast<T>(bb));
        }
    }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        if (x.c() != in_ch_)
            throw config_error("conv2d: expected " + std::to_string(in_ch_) +
                               " input channels, got " + std::to_string(x.c()));
        ConvGeom g{x.h(), x.w(), k_, k_, stride_, pad_, dilation_};
        const int oh = g.out_h(), ow = g.out_w();
        const int spatial = oh * ow;
        const int ck2 = in_ch_ * k_ * k_;
        Tensor<T> y(x.n(), out_ch_, oh, ow);
        col_.resize(static_cast<std::size_t>(ck2) * spatial);
        for (int n = 0; n < x.n(); ++n) {
            im2col(x.plane(n, 0), in_ch_, g, col_.data());
            gemm(false, false, out_ch_, spatial, ck2, T(1), weight_.value.data(),
                 col_.data(), T(0), y.plane(n, 0));
            if (has_bias_) {
                for (int c = 0; c < out_ch_; ++c) {
                    T* p = y.plane(n, c);
                    const T b = bias_.value[c];
                    for (int i = 0; i < spatial; ++i) p[i] += b;
                }
            }
        }
        if (train) x_cache_ = x; else x_cache_ = Tensor<T>();
        return y;
    }

    /// Accumulates weight/bias grads; returns grad wrt input.
    Tensor<T> backward(const Tensor<T>& gy) {
        const Tensor<T>& x = x_cache_;
        ConvGeom g{x.h(), x.w(), k_, k_, stride_, pad_, dilation_};
        const int spatial = gy.h() * gy.w();
        const int ck2 = in_ch_ * k_ * k_;
        Tensor<T> gx = Tensor<T>::zeros_like(x);
        col_.resize(static_cast<std::size_t>(ck2) * spatial);
        std::vector<T> gcol(static_cast<std::size_t>(ck2) * spatial);
        for (int n = 0; n < x.n(); ++n) {
            // dW += gy(n) * col(n)^T
            im2col(x.plane(n, 0), in_ch_, g, col_.data());
            gemm(false, true, out_ch_, ck2, spatial, T(1), gy.plane(n, 0),
                 col_.data(), T(1), weight_.grad.data());
            // gcol = W^T * gy(n); gx(n) = col2im(gcol)
            gemm(true, false, ck2, spatial, out_ch_, T(1), weight_.value.data(),
                 gy.plane(n, 0), T(0), gcol.data());
            col2im(gcol.data(), in_ch_, g, gx.plane(n, 0));
            if (has_bias_) {
                for (int c = 0; c < out_ch_; ++c) {
                    const T* p = gy.plane(n, c);
                    T s = T(0);
                    for (int i = 0; i < spatial; ++i) s += p[i];
                    bias_.grad[c] += s;
                }
            }
        }
        return gx;
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        out.push_back({prefix + ".weight", &weight_});
        if (has_bias_) out.push_back({prefix + ".bias", &bias_});
    }

    std::size_t param_count() const { return weight_.size() + (has_bias_ ? bias_.size() : 0); }

    /// Multiply-accumulate count for one sample at the given input size.
    double macs(int in_h, int in_w) const {
        ConvGeom g{in_h, in_w, k_, k_, stride_, pad_, dilation_};
        return static_cast<double>(k_) * k_ * in_ch_ * out_ch_ * g.out_h() * g.out_w();
    }

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int kernel() const { return k_; }
    Parameter<T>& weight() { return weight_; }
    Parameter<T>& bias() { return bias_; }

private:
    int in_ch_ = 0, out_ch_ = 0, k_ = 0, stride_ = 1, pad_ = 0, dilation_ = 1;
    bool has_bias_ = true;
    Parameter<T> weight_, bias_;
    Tensor<T> x_cache_;
    std::vector<T> col_;
};

}  // namespace foga
