#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"
#include "foga/nn/param.hpp"

namespace foga {

/// Group normalization with per-channel affine parameters. Statistics are
/// computed per (sample, group), so train and eval paths are identical.
template <class T>
class GroupNorm {
public:
    GroupNorm() = default;
    GroupNorm(int channels, int groups, T eps = T(1e-5))
        : channels_(channels), groups_(groups), eps_(eps) {
        if (channels % groups != 0)
            throw config_error("groupnorm: channels " + std::to_string(channels) +
                               " not divisible by groups " + std::to_string(groups));
        gamma_.init(channels, 1, 1, 1);
        beta_.init(channels, 1, 1, 1);
        gamma_.value.fill(T(1));
    }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        const int cg = channels_ / groups_;
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        const std::size_t group_len = plane * cg;
        Tensor<T> y = Tensor<T>::zeros_like(x);
        mean_.assign(static_cast<std::size_t>(x.n()) * groups_, T(0));
        inv_std_.assign(static_cast<std::size_t>(x.n()) * groups_, T(0));
        for (int n = 0; n < x.n(); ++n) {
            for (int g = 0; g < groups_; ++g) {
                const T* src = x.plane(n, g * cg);
                T mean = T(0);
                for (std::size_t i = 0; i < group_len; ++i) mean += src[i];
                mean /= static_cast<T>(group_len);
                T var = T(0);
                for (std::size_t i = 0; i < group_len; ++i) {
                    const T d = src[i] - mean;
                    var += d * d;
                }
                var /= static_cast<T>(group_len);
                const T istd = T(1) / std::sqrt(var + eps_);
                mean_[static_cast<std::size_t>(n) * groups_ + g] = mean;
                inv_std_[static_cast<std::size_t>(n) * groups_ + g] = istd;
                for (int c = 0; c < cg; ++c) {
                    const int ch = g * cg + c;
                    const T* s = x.plane(n, ch);
                    T* d = y.plane(n, ch);
                    const T scale = gamma_.value[ch] * istd;
                    const T shift = beta_.value[ch] - mean * scale;
                    for (std::size_t i = 0; i < plane; ++i) d[i] = s[i] * scale + shift;
                }
            }
        }
        if (train) x_cache_ = x; else x_cache_ = Tensor<T>();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        const Tensor<T>& x = x_cache_;
        const int cg = channels_ / groups_;
        const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
        const std::size_t group_len = plane * cg;
        Tensor<T> gx = Tensor<T>::zeros_like(x);
        for (int n = 0; n < x.n(); ++n) {
            for (int g = 0; g < groups_; ++g) {
                const T mean = mean_[static_cast<std::size_t>(n) * groups_ + g];
                const T istd = inv_std_[static_cast<std::size_t>(n) * groups_ + g];
                // Accumulate per-group sums of dxhat and dxhat*xhat.
                T sum_dxh = T(0), sum_dxh_xh = T(0);
                for (int c = 0; c < cg; ++c) {
                    const int ch = g * cg + c;
                    const T* xs = x.plane(n, ch);
                    const T* gys = gy.plane(n, ch);
                    const T gam = gamma_.value[ch];
                    T dgamma = T(0), dbeta = T(0);
                    for (std::size_t i = 0; i < plane; ++i) {
                        const T xh = (xs[i] - mean) * istd;
                        const T dxh = gys[i] * gam;
                        sum_dxh += dxh;
                        sum_dxh_xh += dxh * xh;
                        dgamma += gys[i] * xh;
                        dbeta += gys[i];
                    }
                    gamma_.grad[ch] += dgamma;
                    beta_.grad[ch] += dbeta;
                }
                const T inv_m = T(1) / static_cast<T>(group_len);
                for (int c = 0; c < cg; ++c) {
                    const int ch = g * cg + c;
                    const T* xs = x.plane(n, ch);
                    const T* gys = gy.plane(n, ch);
                    const T gam = gamma_.value[ch];
                    T* gxs = gx.plane(n, ch);
                    for (std::size_t i = 0; i < plane; ++i) {
                        const T xh = (xs[i] - mean) * istd;
                        const T dxh = gys[i] * gam;
                        gxs[i] = istd * (dxh - inv_m * (sum_dxh + xh * sum_dxh_xh));
                    }
                }
            }
        }
        return gx;
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        out.push_back({prefix + ".gamma", &gamma_});
        out.push_back({prefix + ".beta", &beta_});
    }

    std::size_t param_count() const { return gamma_.size() + beta_.size(); }

private:
    int channels_ = 0, groups_ = 1;
    T eps_ = T(1e-5);
    Parameter<T> gamma_, beta_;
    Tensor<T> x_cache_;
    std::vector<T> mean_, inv_std_;
};

}  // namespace foga
