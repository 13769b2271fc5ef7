#pragma once

#include <array>
#include <limits>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"

namespace foga {

/// 2x2 max pooling, stride 2. Input spatial size must be even.
template <class T>
class MaxPool2d {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        if (x.h() % 2 != 0 || x.w() % 2 != 0)
            throw config_error("maxpool2d: odd spatial size " + x.shape_str());
        const int oh = x.h() / 2, ow = x.w() / 2;
        Tensor<T> y(x.n(), x.c(), oh, ow);
        argmax_.resize(y.size());
        in_shape_ = {x.n(), x.c(), x.h(), x.w()};
        std::size_t o = 0;
        for (int n = 0; n < x.n(); ++n) {
            for (int c = 0; c < x.c(); ++c) {
                const T* s = x.plane(n, c);
                for (int i = 0; i < oh; ++i) {
                    for (int j = 0; j < ow; ++j) {
                        const std::size_t base = static_cast<std::size_t>(2 * i) * x.w() + 2 * j;
                        std::size_t best = base;
                        T bv = s[base];
                        const std::size_t cands[3] = {base + 1, base + x.w(), base + x.w() + 1};
                        for (const auto cand : cands) {
                            if (s[cand] > bv) { bv = s[cand]; best = cand; }
                        }
                        y[o] = bv;
                        argmax_[o] = best;
                        ++o;
                    }
                }
            }
        }
        if (!train) argmax_.clear();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gx(in_shape_[0], in_shape_[1], in_shape_[2], in_shape_[3]);
        const std::size_t plane = static_cast<std::size_t>(in_shape_[2]) * in_shape_[3];
        std::size_t o = 0;
        const std::size_t out_plane = gy.size() / (static_cast<std::size_t>(gy.n()) * gy.c());
        for (int n = 0; n < gy.n(); ++n) {
            for (int c = 0; c < gy.c(); ++c) {
                T* d = gx.plane(n, c);
                const T* g = gy.plane(n, c);
                for (std::size_t i = 0; i < out_plane; ++i, ++o) d[argmax_[o]] += g[i];
                (void)plane;
            }
        }
        return gx;
    }

private:
    std::vector<std::size_t> argmax_;
    std::array<int, 4> in_shape_ = {0, 0, 0, 0};
};

/// Global average pooling to (N, C, 1, 1).
template <class T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    Tensor<T> y(x.n(), x.c(), 1, 1);
    const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
    for (int n = 0; n < x.n(); ++n) {
        for (int c = 0; c < x.c(); ++c) {
            const T* s = x.plane(n, c);
            T sum = T(0);
            for (std::size_t i = 0; i < plane; ++i) sum += s[i];
            y.at(n, c, 0, 0) = sum / static_cast<T>(plane);
        }
    }
    return y;
}

/// Mean over the channel axis to (N, 1, H, W).
template <class T>
Tensor<T> channel_mean(const Tensor<T>& x) {
    Tensor<T> y(x.n(), 1, x.h(), x.w());
    const std::size_t plane = static_cast<std::size_t>(x.h()) * x.w();
    for (int n = 0; n < x.n(); ++n) {
        T* d = y.plane(n, 0);
        for (int c = 0; c < x.c(); ++c) {
            const T* s = x.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) d[i] += s[i];
        }
        const T inv = T(1) / static_cast<T>(x.c());
        for (std::size_t i = 0; i < plane; ++i) d[i] *= inv;
    }
    return y;
}

}  // namespace foga
