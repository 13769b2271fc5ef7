#include <catch_amalgamated.hpp>

#include <cmath>

#include "foga/model/config.hpp"
#include "foga/model/gcam.hpp"
#include "testing.hpp"

using namespace foga;
using foga::testing::rel_err;

namespace {

// Formula oracle written independently of the implementation: floor of
// (log2(v) + b) / gamma, bumped up when even.
int kernel_rule(double v, int b, int gamma, int floor_at) {
    const double raw = (std::log2(v) + b) / gamma;
    int k = static_cast<int>(std::floor(raw));
    if (k % 2 == 0) k += 1;
    return std::max(floor_at, k);
}

}  // namespace

TEST_CASE("channel-attention kernel table") {
    const int channels[] = {8, 16, 32, 64, 128, 256, 512};
    const int expect[] = {3, 3, 3, 3, 5, 5, 5};
    for (int i = 0; i < 7; ++i) {
        REQUIRE(eca_kernel_size(channels[i]) == expect[i]);
        REQUIRE(eca_kernel_size(channels[i]) == kernel_rule(channels[i], 1, 2, 1));
    }
    REQUIRE(eca_kernel_size(1) == 1);
    REQUIRE_THROWS_AS(eca_kernel_size(0), config_error);
}

TEST_CASE("spatial-attention kernel table") {
    const int sizes[] = {28, 56, 112, 224};
    const int expect[] = {5, 7, 7, 9};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(esa_kernel_size(sizes[i], sizes[i]) == expect[i]);
        REQUIRE(esa_kernel_size(sizes[i], sizes[i]) ==
                kernel_rule(static_cast<double>(sizes[i]) * sizes[i], 1, 2, 3));
    }
    REQUIRE(esa_kernel_size(2, 2) == 3);  // clamped at the floor
}

TEST_CASE("kernel sizes are odd and non-decreasing") {
    int prev = 1;
    for (int c = 1; c <= 2048; c *= 2) {
        const int k = eca_kernel_size(c);
        REQUIRE(k % 2 == 1);
        REQUIRE(k >= prev);
        prev = k;
    }
    prev = 3;
    for (int s = 2; s <= 1024; s *= 2) {
        const int k = esa_kernel_size(s, s);
        REQUIRE(k % 2 == 1);
        REQUIRE(k >= prev);
        prev = k;
    }
}

TEST_CASE("cfa preserves shape and collapses to a bias pattern on zero input") {
    Rng rng(2);
    Cfa<float> cfa(16, 4);
    cfa.init_weights(rng);
    Tensor<float> fe(2, 16, 12, 12);
    fe.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> fd = fe;
    fd *= -1.f;
    // X = f_e + f_d = 0: every spatial position sees the same bias response.
    Tensor<float> x = fe + fd;
    Tensor<float> y = cfa.forward(x);
    REQUIRE(y.same_shape(fe));
    for (int c = 0; c < y.c(); ++c) {
        const float v0 = y.at(0, c, 0, 0);
        for (int i = 0; i < y.h(); ++i)
            for (int j = 0; j < y.w(); ++j)
                REQUIRE(y.at(0, c, i, j) == Catch::Approx(v0).margin(1e-6));
    }
}

TEST_CASE("cfa parameter count follows the five-branch layout") {
    // branches: C -> C/r with kernels {1,3,5,3d3,3d5}; fusion: 5C/r -> C, 1x1.
    for (int c : {32, 64, 128}) {
        const int r = 8;
        const int bw = c / r;
        const std::size_t expect = static_cast<std::size_t>(c) * bw * (1 + 9 + 25 + 9 + 9) +
                                   5 * bw +                       // branch biases
                                   static_cast<std::size_t>(5 * bw) * c + c;  // fusion
        Cfa<float> cfa(c, r);
        REQUIRE(cfa.param_count() == expect);
    }
}

TEST_CASE("eca on zero input halves nothing: map is exactly one half") {
    Rng rng(4);
    Eca<float> eca(16);
    eca.init_weights(rng);
    Tensor<float> x(2, 16, 6, 6);
    Tensor<float> y = eca.forward(x);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == 0.0f);
    const Tensor<float>& m = eca.channel_map();
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(m[i] == 0.5f);
}

TEST_CASE("eca keeps per-channel-constant inputs per-channel-constant") {
    Rng rng(5);
    Eca<float> eca(8);
    eca.init_weights(rng);
    Tensor<float> x(1, 8, 5, 5);
    for (int c = 0; c < 8; ++c) {
        float* p = x.plane(0, c);
        for (int i = 0; i < 25; ++i) p[i] = 0.3f * c - 1.f;
    }
    Tensor<float> y = eca.forward(x);
    for (int c = 0; c < 8; ++c) {
        const float v0 = y.at(0, c, 0, 0);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) REQUIRE(y.at(0, c, i, j) == v0);
    }
}

TEST_CASE("eca matches a naive per-channel sliding dot product") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const int b = 1 + static_cast<int>(rng.uniform_int(0, 3));
        const int c = 2 + static_cast<int>(rng.uniform_int(0, 14));
        const int hw = 2 + static_cast<int>(rng.uniform_int(0, 6));
        Eca<double> eca(c);
        eca.init_weights(rng);
        Tensor<double> x(b, c, hw, hw);
        x.fill_uniform(rng, -2.0, 2.0);
        eca.forward(x);
        const Tensor<double>& fast = eca.channel_map();
        // Naive path: average pool by loops, slide the kernel with zero pad.
        const int k = eca.kernel();
        const int off = (k - 1) / 2;
        ParamList<double> params;
        eca.collect(params, "eca");
        const Tensor<double>& w = params[0].param->value;
        for (int n = 0; n < b; ++n) {
            std::vector<double> pooled(static_cast<std::size_t>(c), 0.0);
            for (int ch = 0; ch < c; ++ch) {
                double s = 0;
                for (int i = 0; i < hw; ++i)
                    for (int j = 0; j < hw; ++j) s += x.at(n, ch, i, j);
                pooled[static_cast<std::size_t>(ch)] = s / (hw * hw);
            }
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0;
                for (int kk = 0; kk < k; ++kk) {
                    const int cc = ch + kk - off;
                    if (cc >= 0 && cc < c) acc += w[kk] * pooled[static_cast<std::size_t>(cc)];
                }
                const double want = 1.0 / (1.0 + std::exp(-acc));
                REQUIRE(std::abs(fast.at(n, ch, 0, 0) - want) < 1e-6);
            }
        }
    }
}

TEST_CASE("esa zero input gives zero output with maps strictly inside (0,1)") {
    Rng rng(6);
    Esa<float> esa(16, 16);
    esa.init_weights(rng);
    Tensor<float> x(1, 4, 16, 16);
    Tensor<float> y = esa.forward(x);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == 0.0f);
    Tensor<float> z(1, 4, 16, 16);
    z.fill_uniform(rng, -1.f, 1.f);
    esa.forward(z);
    const Tensor<float>& m = esa.spatial_map();
    for (std::size_t i = 0; i < m.size(); ++i) {
        REQUIRE(m[i] > 0.0f);
        REQUIRE(m[i] < 1.0f);
    }
}

TEST_CASE("esa map is flat in the interior for spatially constant input") {
    Rng rng(7);
    const int hw = 16;
    Esa<double> esa(hw, hw);
    esa.init_weights(rng);
    Tensor<double> x(1, 3, hw, hw, 0.37);
    esa.forward(x);
    const Tensor<double>& m = esa.spatial_map();
    const int margin = (esa.kernel() - 1) / 2;
    const double v0 = m.at(0, 0, margin, margin);
    for (int i = margin; i < hw - margin; ++i)
        for (int j = margin; j < hw - margin; ++j)
            REQUIRE(std::abs(m.at(0, 0, i, j) - v0) < 1e-6);
}

TEST_CASE("gate fusion: zero input with zero bias stays zero; gate params match") {
    GateFuse<float> gate(32);
    // zero-initialized weights and bias by construction
    Tensor<float> fc(1, 32, 4, 4);
    Tensor<float> fs(1, 32, 4, 4);
    Tensor<float> y = gate.forward(fc, fs);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == 0.0f);
    // conv 1x1: 2C -> C plus bias
    std::size_t total = 0;
    for (int c : {32, 64, 128}) total += static_cast<std::size_t>(2 * c) * c + c;
    REQUIRE(total == 43'232);
    REQUIRE(GateFuse<float>(64).param_count() == 2 * 64 * 64 + 64);
}

TEST_CASE("gate attenuates: |out| <= |F_c + F_s| element-wise") {
    Rng rng(8);
    GateFuse<float> gate(8);
    gate.init_weights(rng);
    Tensor<float> fc(2, 8, 6, 6), fs(2, 8, 6, 6);
    fc.fill_uniform(rng, -2.f, 2.f);
    fs.fill_uniform(rng, -2.f, 2.f);
    Tensor<float> y = gate.forward(fc, fs);
    for (std::size_t i = 0; i < y.size(); ++i)
        REQUIRE(std::abs(y[i]) <= std::abs(fc[i] + fs[i]) + 1e-7f);
}

TEST_CASE("gcam with both stages off is exactly the element-wise sum") {
    ModelConfig cfg;
    cfg.use_cfa = false;
    cfg.use_ega = false;
    Gcam<float> unit(16, 8, 8, cfg);
    Rng rng(9);
    Tensor<float> fe(1, 16, 8, 8), fd(1, 16, 8, 8);
    fe.fill_uniform(rng, -1.f, 1.f);
    fd.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> y = unit.forward(fe, fd);
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == fe[i] + fd[i]);
    REQUIRE(unit.param_count() == 0);
}

TEST_CASE("gcam output keeps the input shape in all four toggle combos") {
    Rng rng(10);
    for (bool cfa : {false, true}) {
        for (bool ega : {false, true}) {
            ModelConfig cfg;
            cfg.use_cfa = cfa;
            cfg.use_ega = ega;
            cfg.cfa_reduction = 4;
            Gcam<float> unit(16, 8, 8, cfg);
            unit.init_weights(rng);
            Tensor<float> fe(2, 16, 8, 8), fd(2, 16, 8, 8);
            fe.fill_uniform(rng, -1.f, 1.f);
            fd.fill_uniform(rng, -1.f, 1.f);
            REQUIRE(unit.forward(fe, fd).same_shape(fe));
        }
    }
    // mismatched scales violate the contract
    ModelConfig cfg;
    Gcam<float> unit(16, 8, 8, cfg);
    unit.init_weights(rng);
    Tensor<float> fe(1, 16, 8, 8), fd(1, 16, 4, 4);
    REQUIRE_THROWS_AS(unit.forward(fe, fd), config_error);
}

TEST_CASE("gcam backward matches finite differences") {
    ModelConfig cfg;
    cfg.cfa_reduction = 4;
    Gcam<double> unit(8, 6, 6, cfg);
    Rng rng(11);
    unit.init_weights(rng);
    Tensor<double> fe(1, 8, 6, 6), fd(1, 8, 6, 6);
    fe.fill_uniform(rng, -1.0, 1.0);
    fd.fill_uniform(rng, -1.0, 1.0);
    Tensor<double> probe = testing::probe_weights(fe, 99);

    auto loss = [&]() { return testing::weighted_sum(unit.forward(fe, fd), probe); };
    loss();
    ParamList<double> params;
    unit.collect(params, "gcam");
    for (auto& p : params) p.param->zero_grad();
    auto [gfe, gfd] = unit.backward(probe);

    // input grads (both routes read the same sum)
    for (std::size_t i = 0; i < fe.size(); i += 17) {
        const double fd_grad = testing::central_diff(loss, &fe[i]);
        REQUIRE(rel_err(fd_grad, gfe[i]) < 1e-6);
    }
    for (std::size_t i = 3; i < fd.size(); i += 23) {
        const double fd_grad = testing::central_diff(loss, &fd[i]);
        REQUIRE(rel_err(fd_grad, gfd[i]) < 1e-6);
    }
    // parameter grads, a strided sample across every tensor
    for (auto& p : params) {
        Tensor<double>& v = p.param->value;
        const std::size_t stride = std::max<std::size_t>(1, v.size() / 7);
        for (std::size_t i = 0; i < v.size(); i += stride) {
            const double fd_grad = testing::central_diff(loss, &v[i]);
            REQUIRE(rel_err(fd_grad, p.param->grad[i]) < 1e-5);
        }
    }
}
