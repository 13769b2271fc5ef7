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

/// Stride-2 transposed convolution, weight layout (in_ch, out_ch, kh, kw).
/// Output size is exactly 2x the input (kernel 3, pad 1, output padding 1).
template <class T>
class ConvTranspose2d {
public:
    ConvTranspose2d() = default;
    ConvTranspose2d(int in_ch, int out_ch, int kernel = 3, int stride = 2,
                    int pad = 1, int out_pad = 1, bool bias = true)
        : in_ch_(in_ch), out_ch_(out_ch), k_(kernel), stride_(stride), pad_(pad),
          out_pad_(out_pad), has_bias_(bias) {
        weight_.init(in_ch, out_ch, kernel, kernel);
        if (bias) bias_.init(out_ch, 1, 1, 1);
    }

    void init_weights(Rng& rng) {
        const double fan_in = static_cast<double>(in_ch_) * k_ * k_;
        const double bound = std::sqrt(6.0 / fan_in);
        weight_.value.fill_uniform(rng, static_cast<T>(-bound), static_cast<T>(bound));
        if (has_bias_) {
            const double bb = 1.0 / std::sqrt(fan_in);
            bias_.value.fill_uniform(rng, static_cast<T>(-bb), static_cast<T>(bb));
        }
    }

    int out_size(int in) const { return (in - 1) * stride_ - 2 * pad_ + k_ + out_pad_; }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        if (x.c() != in_ch_)
            throw config_error("conv_transpose2d: expected " + std::to_string(in_ch_) +
                               " input channels, got " + std::to_string(x.c()));
        const int oh = out_size(x.h()), ow = out_size(x.w());
        // The forward pass is the adjoint of a (k, stride, pad) convolution
        // whose input is the *output* grid; that conv maps oh x ow back to
        // exactly x.h() x x.w() positions.
        ConvGeom g{oh, ow, k_, k_, stride_, pad_, 1};
        const int spatial = x.h() * x.w();
        const int ck2 = out_ch_ * k_ * k_;
        Tensor<T> y(x.n(), out_ch_, oh, ow);
        std::vector<T>& cols = col_;
        cols.resize(static_cast<std::size_t>(ck2) * spatial);
        for (int n = 0; n < x.n(); ++n) {
            // cols = W^T (ck2 x in) * x (in x spatial)
            gemm(true, false, ck2, spatial, in_ch_, T(1), weight_.value.data(),
                 x.plane(n, 0), T(0), cols.data());
            col2im(cols.data(), out_ch_, g, y.plane(n, 0));
            if (has_bias_) {
                const int out_spatial = oh * ow;
                for (int c = 0; c < out_ch_; ++c) {
                    T* p = y.plane(n, c);
                    const T b = bias_.value[c];
                    for (int i = 0; i < out_spatial; ++i) p[i] += b;
                }
            }
        }
        if (train) x_cache_ = x; else x_cache_ = Tensor<T>();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        const Tensor<T>& x = x_cache_;
        ConvGeom g{gy.h(), gy.w(), k_, k_, stride_, pad_, 1};
        const int spatial = x.h() * x.w();
        const int ck2 = out_ch_ * k_ * k_;
        Tensor<T> gx(x.n(), in_ch_, x.h(), x.w());
        col_.resize(static_cast<std::size_t>(ck2) * spatial);
        for (int n = 0; n < x.n(); ++n) {
            im2col(gy.plane(n, 0), out_ch_, g, col_.data());
            // gx(n) = W (in x ck2) * cols (ck2 x spatial)
            gemm(false, false, in_ch_, spatial, ck2, T(1), weight_.value.data(),
                 col_.data(), T(0), gx.plane(n, 0));
            // dW += x(n) (in x spatial) * cols^T (spatial x ck2)
            gemm(false, true, in_ch_, ck2, spatial, T(1), x.plane(n, 0),
                 col_.data(), T(1), weight_.grad.data());
            if (has_bias_) {
                const int out_spatial = gy.h() * gy.w();
                for (int c = 0; c < out_ch_; ++c) {
                    const T* p = gy.plane(n, c);
                    T s = T(0);
                    for (int i = 0; i < out_spatial; ++i) s += p[i];
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

    /// MACs for one sample; every input position touches the full kernel.
    double macs(int in_h, int in_w) const {
        return static_cast<double>(k_) * k_ * in_ch_ * out_ch_ * in_h * in_w;
    }

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }

private:
    int in_ch_ = 0, out_ch_ = 0, k_ = 3, stride_ = 2, pad_ = 1, out_pad_ = 1;
    bool has_bias_ = true;
    Parameter<T> weight_, bias_;
    Tensor<T> x_cache_;
    std::vector<T> col_;
};

}  // namespace foga
