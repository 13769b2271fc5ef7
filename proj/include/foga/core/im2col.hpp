#pragma once

#include <cstring>
#include <vector>

namespace foga {

struct ConvGeom {
    int in_h = 0, in_w = 0;
    int kh = 0, kw = 0;
    int stride = 1;
    int pad = 0;
    int dilation = 1;

    int out_h() const { return (in_h + 2 * pad - dilation * (kh - 1) - 1) / stride + 1; }
    int out_w() const { return (in_w + 2 * pad - dilation * (kw - 1) - 1) / stride + 1; }
};

/// Unfold one sample's planes: src is (channels, in_h, in_w) contiguous,
/// col is (channels * kh * kw) x (out_h * out_w) row-major.
template <class T>
void im2col(const T* src, int channels, const ConvGeom& g, T* col) {
    const int oh = g.out_h(), ow = g.out_w();
    const std::size_t plane = static_cast<std::size_t>(g.in_h) * g.in_w;
    T* dst = col;
    for (int c = 0; c < channels; ++c) {
        const T* s = src + c * plane;
        for (int ki = 0; ki < g.kh; ++ki) {
            for (int kj = 0; kj < g.kw; ++kj) {
                const int di = ki * g.dilation - g.pad;
                const int dj = kj * g.dilation - g.pad;
                for (int oi = 0; oi < oh; ++oi) {
                    const int ii = oi * g.stride + di;
                    if (ii < 0 || ii >= g.in_h) {
                        std::memset(dst, 0, sizeof(T) * ow);
                        dst += ow;
                        continue;
                    }
                    if (g.stride == 1 && dj >= 0 && dj + ow <= g.in_w) {
                        std::memcpy(dst, s + static_cast<std::size_t>(ii) * g.in_w + dj,
                                    sizeof(T) * ow);
                        dst += ow;
                        continue;
                    }
                    for (int oj = 0; oj < ow; ++oj) {
                        const int jj = oj * g.stride + dj;
                        *dst++ = (jj >= 0 && jj < g.in_w)
                                     ? s[static_cast<std::size_t>(ii) * g.in_w + jj]
                                     : T(0);
                    }
                }
            }
        }
    }
}

/// Adjoint of im2col: scatter-add col back onto (channels, in_h, in_w).
/// dst must be zeroed by the caller.
template <class T>
void col2im(const T* col, int channels, const ConvGeom& g, T* dst) {
    const int oh = g.out_h(), ow = g.out_w();
    const std::size_t plane = static_cast<std::size_t>(g.in_h) * g.in_w;
    const T* src = col;
    for (int c = 0; c < channels; ++c) {
        T* d = dst + c * plane;
        for (int ki = 0; ki < g.kh; ++ki) {
            for (int kj = 0; kj < g.kw; ++kj) {
                const int di = ki * g.dilation - g.pad;
                const int dj = kj * g.dilation - g.pad;
                for (int oi = 0; oi < oh; ++oi) {
                    const int ii = oi * g.stride + di;
                    if (ii < 0 || ii >= g.in_h) {
                        src += ow;
                        continue;
                    }
                    for (int oj = 0; oj < ow; ++oj) {
                        const int jj = oj * g.stride + dj;
                        if (jj >= 0 && jj < g.in_w)
                            d[static_cast<std::size_t>(ii) * g.in_w + jj] += *src;
                        ++src;
                    }
                }
            }
        }
    }
}

}  // namespace foga
