#include <catch_amalgamated.hpp>

#include "foga/core/blas.hpp"
#include "foga/core/im2col.hpp"
#include "foga/core/rng.hpp"
#include "foga/core/tensor.hpp"

using namespace foga;

TEST_CASE("rng is deterministic and reasonably distributed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    Rng c(7);
    double mean = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) mean += c.uniform();
    mean /= n;
    REQUIRE(std::abs(mean - 0.5) < 0.02);
    Rng d(9);
    double m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = d.normal();
        m2 += v * v;
    }
    REQUIRE(std::abs(m2 / n - 1.0) < 0.05);
}

TEST_CASE("tensor indexing and channel concat/split round-trip") {
    Tensor<float> a(2, 3, 4, 5);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<float>(i);
    REQUIRE(a.at(1, 2, 3, 4) == static_cast<float>(a.size() - 1));
    Tensor<float> b(2, 2, 4, 5, 7.f);
    Tensor<float> cat = concat_channels(a, b);
    REQUIRE(cat.c() == 5);
    Tensor<float> a2, b2;
    split_channels(cat, 3, a2, b2);
    REQUIRE(a2.vec() == a.vec());
    REQUIRE(b2.vec() == b.vec());
}

namespace {

// Direct convolution used as the oracle for the im2col path.
template <class T>
Tensor<T> conv_reference(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad,
                         int dilation) {
    const int kh = w.h(), kw = w.w();
    ConvGeom g{x.h(), x.w(), kh, kw, stride, pad, dilation};
    Tensor<T> y(x.n(), w.n(), g.out_h(), g.out_w());
    for (int n = 0; n < x.n(); ++n)
        for (int oc = 0; oc < w.n(); ++oc)
            for (int oi = 0; oi < y.h(); ++oi)
                for (int oj = 0; oj < y.w(); ++oj) {
                    T acc = T(0);
                    for (int ic = 0; ic < x.c(); ++ic)
                        for (int ki = 0; ki < kh; ++ki)
                            for (int kj = 0; kj < kw; ++kj) {
                                const int ii = oi * stride + ki * dilation - pad;
                                const int jj = oj * stride + kj * dilation - pad;
                                if (ii < 0 || ii >= x.h() || jj < 0 || jj >= x.w()) continue;
                                acc += w.at(oc, ic, ki, kj) * x.at(n, ic, ii, jj);
                            }
                    y.at(n, oc, oi, oj) = acc;
                }
    return y;
}

}  // namespace

TEST_CASE("im2col matches direct convolution across geometries") {
    Rng rng(3);
    struct Case {
        int k, stride, pad, dilation;
    };
    const Case cases[] = {{1, 1, 0, 1}, {3, 1, 1, 1}, {5, 1, 2, 1},
                          {3, 1, 3, 3}, {3, 1, 5, 5}, {3, 2, 1, 1}};
    for (const auto& cs : cases) {
        Tensor<double> x(2, 3, 12, 10);
        x.fill_uniform(rng, -1.0, 1.0);
        Tensor<double> w(4, 3, cs.k, cs.k);
        w.fill_uniform(rng, -0.5, 0.5);
        ConvGeom g{x.h(), x.w(), cs.k, cs.k, cs.stride, cs.pad, cs.dilation};
        const int spatial = g.out_h() * g.out_w();
        const int ck2 = x.c() * cs.k * cs.k;
        Tensor<double> y(x.n(), w.n(), g.out_h(), g.out_w());
        std::vector<double> col(static_cast<std::size_t>(ck2) * spatial);
        for (int n = 0; n < x.n(); ++n) {
            im2col(x.plane(n, 0), x.c(), g, col.data());
            gemm(false, false, w.n(), spatial, ck2, 1.0, w.data(), col.data(), 0.0,
                 y.plane(n, 0));
        }
        Tensor<double> ref = conv_reference(x, w, cs.stride, cs.pad, cs.dilation);
        for (std::size_t i = 0; i < y.size(); ++i)
            REQUIRE(y[i] == Catch::Approx(ref[i]).margin(1e-12));
    }
}

TEST_CASE("col2im is the adjoint of im2col") {
    // <im2col(x), c> == <x, col2im(c)> for arbitrary x and c.
    Rng rng(11);
    ConvGeom g{9, 8, 3, 3, 2, 1, 1};
    const int channels = 2;
    const std::size_t col_len =
        static_cast<std::size_t>(channels) * 9 * g.out_h() * g.out_w();
    Tensor<double> x(1, channels, g.in_h, g.in_w);
    x.fill_uniform(rng, -1.0, 1.0);
    std::vector<double> c(col_len);
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    std::vector<double> xc(col_len);
    im2col(x.plane(0, 0), channels, g, xc.data());
    double lhs = 0;
    for (std::size_t i = 0; i < col_len; ++i) lhs += xc[i] * c[i];
    Tensor<double> back(1, channels, g.in_h, g.in_w);
    col2im(c.data(), channels, g, back.plane(0, 0));
    double rhs = 0;
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * back[i];
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
}
