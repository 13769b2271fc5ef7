#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "foga/datapipe/dataset.hpp"
#include "foga/datapipe/image.hpp"
#include "foga/datapipe/synthetic.hpp"

using namespace foga;
namespace fs = std::filesystem;

namespace {

ImageU8 constant_image(int h, int w, int ch, std::uint8_t v) {
    ImageU8 img;
    img.h = h;
    img.w = w;
    img.channels = ch;
    img.data.assign(static_cast<std::size_t>(h) * w * ch, v);
    return img;
}

// Independent bilinear resize + affine map, written from the sampling
// definition: src = (dst + 0.5) * in/out - 0.5, clamped, then v*2 - 1.
std::vector<double> naive_preprocess(const ImageU8& img, int out) {
    std::vector<double> res(static_cast<std::size_t>(out) * out);
    const double s = static_cast<double>(img.h) / out;
    for (int i = 0; i < out; ++i) {
        for (int j = 0; j < out; ++j) {
            double fy = std::clamp((i + 0.5) * s - 0.5, 0.0, img.h - 1.0);
            double fx = std::clamp((j + 0.5) * s - 0.5, 0.0, img.w - 1.0);
            const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
            const int y1 = std::min(y0 + 1, img.h - 1), x1 = std::min(x0 + 1, img.w - 1);
            const double wy = fy - y0, wx = fx - x0;
            auto px = [&](int y, int x) { return img.at(y, x, 0) / 255.0; };
            const double v = (1 - wy) * ((1 - wx) * px(y0, x0) + wx * px(y0, x1)) +
                             wy * ((1 - wx) * px(y1, x0) + wx * px(y1, x1));
            res[static_cast<std::size_t>(i) * out + j] = v * 2.0 - 1.0;
        }
    }
    return res;
}

}  // namespace

TEST_CASE("preprocess maps the 8-bit range onto [-1, 1]") {
    auto zero = preprocess_frame<float>(constant_image(17, 23, 1, 0), 3, 224);
    REQUIRE(zero.min() == -1.0f);
    REQUIRE(zero.max() == -1.0f);
    auto full = preprocess_frame<float>(constant_image(300, 300, 3, 255), 3, 224);
    REQUIRE(full.min() == 1.0f);
    REQUIRE(full.max() == 1.0f);
}

TEST_CASE("preprocess of a constant image stays constant after resizing") {
    auto t = preprocess_frame<float>(constant_image(97, 41, 1, 101), 3, 224);
    const float expect = 101.f / 255.f * 2.f - 1.f;
    REQUIRE(t.min() == Catch::Approx(expect).margin(1e-6));
    REQUIRE(t.max() == Catch::Approx(expect).margin(1e-6));
}

TEST_CASE("checkerboard downsample matches the naive oracle with mean zero") {
    ImageU8 board = constant_image(448, 448, 1, 0);
    for (int y = 0; y < 448; ++y)
        for (int x = 0; x < 448; ++x)
            if ((x + y) % 2 == 0) board.at(y, x, 0) = 255;
    auto got = preprocess_frame<float>(board, 3, 224);
    REQUIRE(got.h() == 224);
    const auto want = naive_preprocess(board, 224);
    double mean = 0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        REQUIRE(static_cast<double>(got[i]) == Catch::Approx(want[i]).margin(1e-6));
        mean += want[i];
    }
    mean /= static_cast<double>(want.size());
    REQUIRE(std::abs(mean) < 1e-6);
    REQUIRE(std::abs(got.mean()) < 1e-6);
}

TEST_CASE("preprocess replicates grayscale across channels") {
    ImageU8 img = constant_image(10, 10, 1, 0);
    img.at(3, 4, 0) = 255;
    auto t = preprocess_frame<float>(img, 3, 224);
    REQUIRE(t.c() == 3);
    for (std::size_t i = 0; i < static_cast<std::size_t>(224) * 224; ++i) {
        REQUIRE(t.plane(0, 0)[i] == t.plane(0, 1)[i]);
        REQUIRE(t.plane(0, 0)[i] == t.plane(0, 2)[i]);
    }
}

TEST_CASE("preprocess rejects empty input naming its origin") {
    ImageU8 empty;
    REQUIRE_THROWS_WITH(preprocess_frame<float>(empty, 3, 224, "bad/frame.png"),
                        Catch::Matchers::ContainsSubstring("bad/frame.png"));
}

TEST_CASE("window enumeration counts") {
    REQUIRE(window_base_indices(12, 4, 4, 1).size() == 5);
    REQUIRE(window_base_indices(8, 4, 4, 1).size() == 1);
    REQUIRE(window_base_indices(7, 4, 4, 1).empty());
    // floor((L - t - sigma) / stride) + 1 whenever L >= t + sigma
    for (int L : {8, 9, 16, 33}) {
        for (int stride : {1, 2, 3}) {
            const auto n = window_base_indices(L, 4, 4, stride).size();
            REQUIRE(static_cast<int>(n) == (L - 8) / stride + 1);
        }
    }
    REQUIRE_THROWS_AS(window_base_indices(12, 0, 4, 1), config_error);
    REQUIRE_THROWS_AS(window_base_indices(12, 4, 0, 1), config_error);
    REQUIRE_THROWS_AS(window_base_indices(12, 4, 4, 0), config_error);
}

TEST_CASE("windows stay consistent with their source frames") {
    SyntheticSpec spec;
    spec.num_train_videos = 1;
    spec.num_test_videos = 0;
    spec.frames_per_video = 12;
    spec.anomalies_per_video = 0;
    spec.seed = 5;
    auto [train, test] = synth_generate(spec);
    auto frames = preprocess_video<float>(train.videos[0], 3, 64);
    const int t = 4, sigma = 4;
    auto windows = make_windows(frames, t, sigma, 1, train.videos[0].id);
    REQUIRE(windows.size() == 5);
    const std::size_t frame_len = frames[0].size();
    for (const auto& w : windows) {
        REQUIRE(w.base_index >= t - 1);
        for (int k = 0; k < t; ++k) {
            const auto& src = frames[static_cast<std::size_t>(w.base_index - t + 1 + k)];
            for (std::size_t i = 0; i < frame_len; ++i)
                REQUIRE(w.inputs[static_cast<std::size_t>(k) * frame_len + i] == src[i]);
        }
        REQUIRE(w.target_immediate.vec() ==
                frames[static_cast<std::size_t>(w.base_index + 1)].vec());
        REQUIRE(w.target_forward.vec() ==
                frames[static_cast<std::size_t>(w.base_index + sigma)].vec());
    }
}

TEST_CASE("synthetic generation is bit-identical under one seed") {
    SyntheticSpec spec;
    spec.num_train_videos = 2;
    spec.num_test_videos = 2;
    spec.frames_per_video = 30;
    spec.seed = 0;
    auto [tr1, te1] = synth_generate(spec);
    auto [tr2, te2] = synth_generate(spec);
    for (std::size_t v = 0; v < tr1.videos.size(); ++v)
        for (int f = 0; f < tr1.videos[v].frame_count(); ++f)
            REQUIRE(tr1.videos[v].frames_mem[static_cast<std::size_t>(f)].data ==
                    tr2.videos[v].frames_mem[static_cast<std::size_t>(f)].data);
    for (std::size_t v = 0; v < te1.videos.size(); ++v)
        REQUIRE(te1.videos[v].labels == te2.videos[v].labels);

    SyntheticSpec other = spec;
    other.seed = 1;
    auto [tr3, te3] = synth_generate(other);
    REQUIRE(tr3.videos[0].frames_mem[5].data != tr1.videos[0].frames_mem[5].data);
}

TEST_CASE("train split carries no labels; zero-anomaly test labels are all zero") {
    SyntheticSpec spec;
    spec.num_train_videos = 1;
    spec.num_test_videos = 2;
    spec.frames_per_video = 20;
    spec.anomalies_per_video = 0;
    auto [train, test] = synth_generate(spec);
    REQUIRE(train.videos[0].labels.empty());
    for (const auto& v : test.videos) {
        REQUIRE(v.labels.size() == 20);
        for (int l : v.labels) REQUIRE(l == 0);
    }
}

TEST_CASE("anomaly labels mark exactly the injected interval") {
    SyntheticSpec spec;
    spec.num_train_videos = 0;
    spec.num_test_videos = 4;
    spec.frames_per_video = 100;
    spec.anomalies_per_video = 1;
    spec.interval_min = 20;
    spec.interval_max = 20;
    spec.anomaly_types = {"teleport"};
    spec.seed = 3;
    auto [train, test] = synth_generate(spec);
    for (const auto& v : test.videos) {
        int positives = 0;
        for (int l : v.labels) positives += l;
        REQUIRE(positives == 20);
        // positives form one contiguous run
        int transitions = 0;
        for (std::size_t i = 1; i < v.labels.size(); ++i)
            transitions += v.labels[i] != v.labels[i - 1];
        REQUIRE(transitions <= 2);
    }
}

TEST_CASE("interval longer than the video is a spec error") {
    SyntheticSpec spec;
    spec.frames_per_video = 10;
    spec.interval_min = 11;
    spec.interval_max = 11;
    REQUIRE_THROWS_AS(spec.validate(), config_error);
}

TEST_CASE("dataset survives a disk round-trip") {
    SyntheticSpec spec;
    spec.num_train_videos = 1;
    spec.num_test_videos = 1;
    spec.frames_per_video = 15;
    spec.height = 32;
    spec.width = 32;
    spec.interval_min = 3;
    spec.interval_max = 5;
    spec.seed = 9;
    auto [train, test] = synth_generate(spec);
    const fs::path root = fs::temp_directory_path() / "foga_test_dataset";
    fs::remove_all(root);
    write_dataset(train, root.string());
    write_dataset(test, root.string());
    DatasetIndex train2 = load_dataset(root.string(), Split::Train);
    DatasetIndex test2 = load_dataset(root.string(), Split::Test);
    REQUIRE(train2.videos.size() == 1);
    REQUIRE(train2.videos[0].frame_count() == 15);
    REQUIRE(train2.videos[0].labels.empty());
    REQUIRE(test2.videos[0].labels == test.videos[0].labels);
    // decoded pixels match the in-memory source exactly (PNG is lossless)
    ImageU8 a = test.videos[0].frame(7);
    ImageU8 b = test2.videos[0].frame(7);
    REQUIRE(a.data == b.data);

    // a labels file with the wrong length is rejected
    {
        std::ofstream bad(root / "test" / test.videos[0].id / "labels.txt");
        bad << "0\n1\n";
    }
    REQUIRE_THROWS_AS(load_dataset(root.string(), Split::Test), data_error);
    fs::remove_all(root);
}

TEST_CASE("loading a missing split fails with a data error") {
    REQUIRE_THROWS_AS(load_dataset("/nonexistent/foga", Split::Train), data_error);
}
