#pragma once

#include <cmath>

#include "foga/core/tensor.hpp"

namespace foga {

template <class T>
class ReLU {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        Tensor<T> y = x;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] < T(0)) y[i] = T(0);
        if (train) y_cache_ = y; else y_cache_ = Tensor<T>();
        return y;
    }
    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gx = gy;
        for (std::size_t i = 0; i < gx.size(); ++i)
            if (y_cache_[i] <= T(0)) gx[i] = T(0);
        return gx;
    }

private:
    Tensor<T> y_cache_;
};

template <class T>
class Tanh {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        Tensor<T> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
        if (train) y_cache_ = y; else y_cache_ = Tensor<T>();
        return y;
    }
    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gx = gy;
        for (std::size_t i = 0; i < gx.size(); ++i)
            gx[i] *= T(1) - y_cache_[i] * y_cache_[i];
        return gx;
    }

private:
    Tensor<T> y_cache_;
};

template <class T>
class Sigmoid {
public:
    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        Tensor<T> y = x;
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = T(1) / (T(1) + std::exp(-y[i]));
        if (train) y_cache_ = y; else y_cache_ = Tensor<T>();
        return y;
    }
    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gx = gy;
        for (std::size_t i = 0; i < gx.size(); ++i)
            gx[i] *= y_cache_[i] * (T(1) - y_cache_[i]);
        return gx;
    }
    const Tensor<T>& cached_output() const { return y_cache_; }

private:
    Tensor<T> y_cache_;
};

}  // namespace foga
