#include <catch_amalgamated.hpp>

#include <filesystem>

#include "foga/engine/checkpoint.hpp"
#include "foga/model/backbone.hpp"
#include "foga/model/conv_block.hpp"
#include "foga/model/losses.hpp"
#include "testing.hpp"

using namespace foga;
namespace fs = std::filesystem;

namespace {

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.t = 2;
    cfg.sigma = 2;
    cfg.input_size = 16;
    cfg.channel_plan = {8, 16, 24, 32};
    cfg.cfa_reduction = 8;
    return cfg;
}

ModelConfig paper_config(bool cfa, bool ega) {
    ModelConfig cfg;  // defaults are the published profile
    cfg.use_cfa = cfa;
    cfg.use_ega = ega;
    return cfg;
}

}  // namespace

TEST_CASE("conv block honors the shape contract") {
    Rng rng(1);
    ConvBlock<float> cb(12, 32, 8);
    cb.init_weights(rng);
    Tensor<float> x(1, 12, 64, 64);
    x.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> y = cb.forward(x);
    REQUIRE(y.n() == 1);
    REQUIRE(y.c() == 32);
    REQUIRE(y.h() == 64);
    REQUIRE(y.w() == 64);
}

TEST_CASE("conv block with zero weights emits the zero-response constant") {
    ConvBlock<float> cb(4, 8, 8);  // weights default to zero
    Rng rng(2);
    Tensor<float> x(2, 4, 16, 16);
    x.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> y = cb.forward(x);
    // normalize(0) = 0 under the affine defaults, relu(0) = 0
    for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(y[i] == 0.0f);
}

TEST_CASE("conv block parameter count: hand-derived for the first block") {
    ConvBlock<float> cb(12, 32, 8);
    // conv 12->32: 12*32*9 + 32; conv 32->32: 32*32*9 + 32; two norms: 2*2*32
    REQUIRE(cb.param_count() == 12 * 32 * 9 + 32 + 32 * 32 * 9 + 32 + 128);
    REQUIRE(cb.param_count() == 12'864);
}

TEST_CASE("encode produces the four-level pyramid") {
    ModelConfig cfg;  // t = 4, plan {32, 64, 128, 256}, 224
    FogaNet<float> net(cfg);
    net.init_weights(7);
    Tensor<float> x(1, 12, 224, 224);
    Rng rng(3);
    x.fill_uniform(rng, -1.f, 1.f);
    auto levels = net.encode(x, false);
    const int expect_c[4] = {32, 64, 128, 256};
    const int expect_s[4] = {224, 112, 56, 28};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(levels[static_cast<std::size_t>(i)].c() == expect_c[i]);
        REQUIRE(levels[static_cast<std::size_t>(i)].h() == expect_s[i]);
        REQUIRE(levels[static_cast<std::size_t>(i)].w() == expect_s[i]);
    }
}

TEST_CASE("encode with t=8 accepts 24 input channels") {
    ModelConfig cfg;
    cfg.t = 8;
    FogaNet<float> net(cfg);
    net.init_weights(7);
    Tensor<float> x(1, 24, 224, 224);
    auto levels = net.encode(x, false);
    REQUIRE(levels[0].c() == 32);
    REQUIRE(levels[3].h() == 28);
    // wrong channel count is rejected loudly
    Tensor<float> bad(1, 12, 224, 224);
    REQUIRE_THROWS_AS(net.encode(bad, false), config_error);
}

TEST_CASE("a batch of identical windows yields identical outputs") {
    ModelConfig cfg = tiny_config();
    FogaNet<float> net(cfg);
    net.init_weights(11);
    Rng rng(4);
    Tensor<float> one(1, cfg.t * cfg.c_in, 16, 16);
    one.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> two(2, cfg.t * cfg.c_in, 16, 16);
    std::copy(one.data(), one.data() + one.size(), two.plane(0, 0));
    std::copy(one.data(), one.data() + one.size(), two.plane(1, 0));
    PredictionPair<float> out = net.forward(two, false);
    const std::size_t half = out.immediate.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        REQUIRE(out.immediate[i] == out.immediate[half + i]);
        REQUIRE(out.forward[i] == out.forward[half + i]);
    }
}

TEST_CASE("all-zero activations decode deterministically with a periodic interior") {
    // Two caveats against naive constancy: zero padding perturbs borders, and
    // stride-2 transposed convolutions map flat inputs onto parity-periodic
    // patterns. After three upsamples the interior is 8x8-periodic; that
    // periodicity plus bit-exact repeatability is the testable content of the
    // constant-output claim.
    ModelConfig cfg = tiny_config();
    cfg.input_size = 96;
    cfg.use_cfa = false;
    cfg.use_ega = false;
    FogaNet<float> net(cfg);
    net.init_weights(5);
    std::array<Tensor<float>, 4> levels = {
        Tensor<float>(1, 8, 96, 96), Tensor<float>(1, 16, 48, 48),
        Tensor<float>(1, 24, 24, 24), Tensor<float>(1, 32, 12, 12)};
    Tensor<float> y1 = net.decode(levels, false);
    Tensor<float> y2 = net.decode(levels, false);
    REQUIRE(y1.c() == cfg.channel_plan[0]);
    REQUIRE(y1.h() == 96);
    for (std::size_t i = 0; i < y1.size(); ++i) REQUIRE(y1[i] == y2[i]);
    for (int c = 0; c < y1.c(); ++c) {
        for (int i = 40; i < 48; ++i) {
            for (int j = 40; j < 48; ++j) {
                const float v0 = y1.at(0, c, i, j);
                REQUIRE(y1.at(0, c, i + 8, j) == Catch::Approx(v0).margin(1e-5));
                REQUIRE(y1.at(0, c, i, j + 8) == Catch::Approx(v0).margin(1e-5));
            }
        }
    }
}

TEST_CASE("predictions are tanh-bounded and deterministic") {
    ModelConfig cfg = tiny_config();
    FogaNet<float> net(cfg);
    net.init_weights(13);
    Rng rng(6);
    Tensor<float> x(2, cfg.t * cfg.c_in, 16, 16);
    x.fill_uniform(rng, -50.f, 50.f);  // arbitrary finite inputs
    PredictionPair<float> a = net.forward(x, false);
    PredictionPair<float> b = net.forward(x, false);
    REQUIRE(a.immediate.same_shape(Tensor<float>(2, cfg.c_in, 16, 16)));
    REQUIRE(a.forward.same_shape(a.immediate));
    for (std::size_t i = 0; i < a.immediate.size(); ++i) {
        REQUIRE(std::abs(a.immediate[i]) <= 1.0f);
        REQUIRE(std::abs(a.forward[i]) <= 1.0f);
        REQUIRE(a.immediate[i] == b.immediate[i]);
        REQUIRE(a.forward[i] == b.forward[i]);
    }
}

TEST_CASE("parameter budgets match the published complexity table") {
    const std::size_t base = count_params(paper_config(false, false));
    const std::size_t ega = count_params(paper_config(false, true));
    const std::size_t cfa = count_params(paper_config(true, false));
    const std::size_t full = count_params(paper_config(true, true));

    // exact hand-derived layer sums for the decided composition
    REQUIRE(base == 1'954'214);
    REQUIRE(ega - base == 43'422);
    REQUIRE(cfa - base == 156'268);
    REQUIRE(full == 2'153'904);

    // published budgets: 1.93M / 2.17M with the module deltas
    REQUIRE(std::abs(static_cast<double>(base) / 1.93e6 - 1.0) < 0.05);
    REQUIRE(std::abs(static_cast<double>(full) / 2.17e6 - 1.0) < 0.05);
    REQUIRE(static_cast<double>(ega - base) > 0.04e6 * 0.75);
    REQUIRE(static_cast<double>(ega - base) < 0.04e6 * 1.25);
    REQUIRE(static_cast<double>(cfa - base) > 0.20e6 * 0.70);
    REQUIRE(static_cast<double>(cfa - base) < 0.20e6 * 1.30);

    // ablation budget ordering
    REQUIRE(base < ega);
    REQUIRE(ega < cfa);
    REQUIRE(cfa < full);
}

TEST_CASE("flop estimate: closed-form single convolution") {
    Conv2d<float> conv(32, 32, 3, 1, 1);
    REQUIRE(2.0 * conv.macs(224, 224) == 2.0 * 9 * 32 * 32 * 224 * 224);
    REQUIRE(2.0 * conv.macs(224, 224) == 924'844'032.0);
}

namespace {

// Independent closed-form FLOP oracle for the decided architecture:
// resolutions 224/112/56/28, two 3x3 convs per block, 3x3 transposed convs,
// five CFA branches at C/r plus a 1x1 fusion, ECA/ESA/gate attention convs.
double flops_oracle(bool use_cfa, bool use_ega) {
    const double res[4] = {224 * 224, 112 * 112, 56 * 56, 28 * 28};
    const double cp[4] = {32, 64, 128, 256};
    const double in_ch = 12;
    double macs = 0;
    macs += (in_ch * cp[0] * 9 + cp[0] * cp[0] * 9) * res[0];
    for (int l = 1; l < 4; ++l)
        macs += (cp[l - 1] * cp[l] * 9 + cp[l] * cp[l] * 9) * res[l];
    for (int l = 3; l >= 1; --l) {
        macs += cp[l] * cp[l - 1] * 9 * res[l];             // upsample (input grid)
        macs += 2 * cp[l - 1] * cp[l - 1] * 9 * res[l - 1];  // decoder block
        if (use_cfa)
            macs += (cp[l - 1] * (cp[l - 1] / 8) * (1 + 9 + 25 + 9 + 9) +
                     5 * (cp[l - 1] / 8) * cp[l - 1]) * res[l - 1];
        if (use_ega) {
            macs += eca_kernel_size(static_cast<int>(cp[l - 1])) * cp[l - 1];
            const int s = static_cast<int>(std::sqrt(res[l - 1]));
            const int k = esa_kernel_size(s, s);
            macs += static_cast<double>(k) * k * res[l - 1];
            macs += 2 * cp[l - 1] * cp[l - 1] * res[l - 1];  // gate conv
        }
    }
    macs += 2 * (cp[0] * 3 * 9) * res[0];  // two output heads
    return 2.0 * macs;
}

}  // namespace

TEST_CASE("flop estimate agrees with the independent closed-form sum") {
    for (bool cfa : {false, true}) {
        for (bool ega : {false, true}) {
            const double got = estimate_flops(paper_config(cfa, ega), 224);
            const double want = flops_oracle(cfa, ega);
            REQUIRE(got == Catch::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("every trainable parameter receives gradient signal") {
    ModelConfig cfg = tiny_config();
    FogaNet<float> net(cfg);
    net.init_weights(21);
    Rng rng(8);
    Tensor<float> x(2, cfg.t * cfg.c_in, 16, 16);
    x.fill_uniform(rng, -1.f, 1.f);
    Tensor<float> ti(2, cfg.c_in, 16, 16), tf(2, cfg.c_in, 16, 16);
    ti.fill_uniform(rng, -1.f, 1.f);
    tf.fill_uniform(rng, -1.f, 1.f);
    PredictionPair<float> pair = net.forward(x, true);
    SsimConfig scfg;
    scfg.window = 11;
    auto loss = total_loss(pair, ti, tf, LossMask{}, scfg, true);
    for (auto& p : net.parameters()) p.param->zero_grad();
    net.backward(loss.grad_immediate, loss.grad_forward);
    for (auto& p : net.parameters()) {
        INFO(p.name);
        REQUIRE(p.param->grad.abs_max() > 0.0f);
    }
}

TEST_CASE("checkpoints round-trip bit-exactly and reject mismatched configs") {
    ModelConfig cfg = tiny_config();
    FogaNet<float> net(cfg);
    net.init_weights(31);
    const fs::path path = fs::temp_directory_path() / "foga_ckpt_test.foga";
    save_checkpoint(path.string(), net, 123);

    LoadedCheckpoint loaded = load_checkpoint(path.string(), &cfg);
    REQUIRE(loaded.step == 123);
    REQUIRE(loaded.config == cfg);
    Rng rng(9);
    Tensor<float> x(1, cfg.t * cfg.c_in, 16, 16);
    x.fill_uniform(rng, -1.f, 1.f);
    PredictionPair<float> a = net.forward(x, false);
    PredictionPair<float> b = loaded.net.forward(x, false);
    for (std::size_t i = 0; i < a.immediate.size(); ++i) {
        REQUIRE(a.immediate[i] == b.immediate[i]);
        REQUIRE(a.forward[i] == b.forward[i]);
    }

    ModelConfig other = cfg;
    other.t = 3;
    REQUIRE_THROWS_AS(load_checkpoint(path.string(), &other), config_error);
    fs::remove(path);
}

TEST_CASE("model config validation rejects bad plans") {
    ModelConfig cfg;
    cfg.channel_plan = {32, 32, 64, 128};
    REQUIRE_THROWS_AS(cfg.validate(), config_error);
    cfg = ModelConfig{};
    cfg.t = 0;
    REQUIRE_THROWS_AS(cfg.validate(), config_error);
    cfg = ModelConfig{};
    cfg.input_size = 100;  // not a multiple of 8
    REQUIRE_THROWS_AS(cfg.validate(), config_error);
}
