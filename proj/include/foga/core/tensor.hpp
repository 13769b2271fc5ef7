#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/rng.hpp"

namespace foga {

/// Dense NCHW tensor. 1-D series and flat buffers use n=len, c=h=w=1.
template <class T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int n, int c, int h, int w, T fill = T(0))
        : n_(n), c_(c), h_(h), w_(w),
          data_(static_cast<std::size_t>(n) * c * h * w, fill) {
        assert(n >= 0 && c >= 0 && h >= 0 && w >= 0);
    }

    static Tensor zeros_like(const Tensor& other) {
        return Tensor(other.n_, other.c_, other.h_, other.w_);
    }

    int n() const { return n_; }
    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool same_shape(const Tensor& o) const {
        return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
    }
    std::string shape_str() const {
        return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," +
               std::to_string(h_) + "," + std::to_string(w_) + ")";
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(int n, int c, int h, int w) { return data_[idx(n, c, h, w)]; }
    const T& at(int n, int c, int h, int w) const { return data_[idx(n, c, h, w)]; }

    std::size_t idx(int n, int c, int h, int w) const {
        return ((static_cast<std::size_t>(n) * c_ + c) * h_ + h) * w_ + w;
    }

    /// Pointer to the start of one (n, c) plane.
    T* plane(int n, int c) { return data_.data() + idx(n, c, 0, 0); }
    const T* plane(int n, int c) const { return data_.data() + idx(n, c, 0, 0); }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
    void zero() { fill(T(0)); }

    void fill_uniform(Rng& rng, T lo, T hi) {
        for (auto& v : data_) v = static_cast<T>(rng.uniform(lo, hi));
    }
    void fill_normal(Rng& rng, T mean, T stddev) {
        for (auto& v : data_) v = static_cast<T>(rng.normal(mean, stddev));
    }

    T min() const { return *std::min_element(data_.begin(), data_.end()); }
    T max() const { return *std::max_element(data_.begin(), data_.end()); }
    T sum() const { return std::accumulate(data_.begin(), data_.end(), T(0)); }
    T mean() const { return data_.empty() ? T(0) : sum() / static_cast<T>(data_.size()); }
    T abs_max() const {
        T m = T(0);
        for (const auto& v : data_) m = std::max(m, static_cast<T>(std::abs(v)));
        return m;
    }
    bool all_finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    Tensor& operator+=(const Tensor& o) {
        assert(same_shape(o));
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    const std::vector<T>& vec() const { return data_; }
    std::vector<T>& vec() { return data_; }

    template <class U>
    Tensor<U> cast() const {
        Tensor<U> out(n_, c_, h_, w_);
        for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
        return out;
    }

private:
    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

template <class T>
Tensor<T> operator+(Tensor<T> a, const Tensor<T>& b) {
    a += b;
    return a;
}

/// Concatenate along the channel axis.
template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    assert(a.n() == b.n() && a.h() == b.h() && a.w() == b.w());
    Tensor<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
    const std::size_t plane = static_cast<std::size_t>(a.h()) * a.w();
    for (int n = 0; n < a.n(); ++n) {
        std::copy(a.plane(n, 0), a.plane(n, 0) + plane * a.c(), out.plane(n, 0));
        std::copy(b.plane(n, 0), b.plane(n, 0) + plane * b.c(), out.plane(n, a.c()));
    }
    return out;
}

template <class T>
void split_channels(const Tensor<T>& ab, int c_a, Tensor<T>& a, Tensor<T>& b) {
    assert(c_a <= ab.c());
    a = Tensor<T>(ab.n(), c_a, ab.h(), ab.w());
    b = Tensor<T>(ab.n(), ab.c() - c_a, ab.h(), ab.w());
    const std::size_t plane = static_cast<std::size_t>(ab.h()) * ab.w();
    for (int n = 0; n < ab.n(); ++n) {
        std::copy(ab.plane(n, 0), ab.plane(n, 0) + plane * c_a, a.plane(n, 0));
        std::copy(ab.plane(n, c_a), ab.plane(n, c_a) + plane * b.c(), b.plane(n, 0));
    }
}

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace foga
