#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"

namespace foga {

/// 8-bit image, HWC interleaved, 1 or 3 channels.
struct ImageU8 {
    int h = 0, w = 0, channels = 0;
    std::vector<std::uint8_t> data;

    bool empty() const { return data.empty(); }
    std::uint8_t& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * w + x) * channels + c];
    }
    std::uint8_t at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * w + x) * channels + c];
    }
};

/// Bilinear sample with half-pixel centers (corner alignment disabled):
/// src = (dst + 0.5) * in/out - 0.5, edges clamped.
template <class T>
Tensor<T> bilinear_resize(const Tensor<T>& x, int out_h, int out_w) {
    Tensor<T> y(x.n(), x.c(), out_h, out_w);
    const double sy = static_cast<double>(x.h()) / out_h;
    const double sx = static_cast<double>(x.w()) / out_w;
    for (int n = 0; n < x.n(); ++n) {
        for (int c = 0; c < x.c(); ++c) {
            const T* src = x.plane(n, c);
            T* dst = y.plane(n, c);
            for (int i = 0; i < out_h; ++i) {
                double fy = (i + 0.5) * sy - 0.5;
                fy = std::clamp(fy, 0.0, static_cast<double>(x.h() - 1));
                const int y0 = static_cast<int>(fy);
                const int y1 = std::min(y0 + 1, x.h() - 1);
                const double wy = fy - y0;
                for (int j = 0; j < out_w; ++j) {
                    double fx = (j + 0.5) * sx - 0.5;
                    fx = std::clamp(fx, 0.0, static_cast<double>(x.w() - 1));
                    const int x0 = static_cast<int>(fx);
                    const int x1 = std::min(x0 + 1, x.w() - 1);
                    const double wx = fx - x0;
                    const double v00 = src[static_cast<std::size_t>(y0) * x.w() + x0];
                    const double v01 = src[static_cast<std::size_t>(y0) * x.w() + x1];
                    const double v10 = src[static_cast<std::size_t>(y1) * x.w() + x0];
                    const double v11 = src[static_cast<std::size_t>(y1) * x.w() + x1];
                    dst[static_cast<std::size_t>(i) * out_w + j] = static_cast<T>(
                        (1 - wy) * ((1 - wx) * v00 + wx * v01) +
                        wy * ((1 - wx) * v10 + wx * v11));
                }
            }
        }
    }
    return y;
}

/// Decode an 8-bit image into a (1, c_in, size, size) tensor in [-1, 1]:
/// bilinear resize, linear map from [0, 255], grayscale replicated across
/// the requested channel count.
template <class T>
Tensor<T> preprocess_frame(const ImageU8& img, int c_in, int size,
                           const std::string& origin = "") {
    if (img.empty() || img.h < 1 || img.w < 1 || img.channels < 1)
        throw data_error("preprocess: empty or corrupt image" +
                         (origin.empty() ? std::string() : " at " + origin));
    if (img.channels != 1 && img.channels != 3)
        throw data_error("preprocess: unsupported channel count " +
                         std::to_string(img.channels) +
                         (origin.empty() ? std::string() : " at " + origin));
    Tensor<T> raw(1, img.channels, img.h, img.w);
    for (int c = 0; c < img.channels; ++c) {
        T* dst = raw.plane(0, c);
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x)
                dst[static_cast<std::size_t>(y) * img.w + x] =
                    static_cast<T>(img.at(y, x, c)) / T(255);
    }
    Tensor<T> resized = (img.h == size && img.w == size)
                            ? std::move(raw)
                            : bilinear_resize(raw, size, size);
    Tensor<T> out(1, c_in, size, size);
    const std::size_t plane = static_cast<std::size_t>(size) * size;
    for (int c = 0; c < c_in; ++c) {
        const T* src = resized.plane(0, resized.c() == 1 ? 0 : std::min(c, resized.c() - 1));
        T* dst = out.plane(0, c);
        for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * T(2) - T(1);
    }
    return out;
}

}  // namespace foga
