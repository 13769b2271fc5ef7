// foga: train, score and benchmark the forward-consistency anomaly detector.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "foga/foga.hpp"

namespace fs = std::filesystem;
using foga::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::string mode;
    std::string device = "cpu";
};

foga::RunConfig resolve(const CommonArgs& args) {
    json tree = json::object();
    if (!args.config_path.empty()) tree = foga::load_json_file(args.config_path);
    for (const auto& ov : args.overrides) foga::apply_override(tree, ov);
    foga::RunConfig cfg = foga::resolve_config(tree);
    if (!args.mode.empty()) cfg.scoring.mode = foga::score_mode_from_string(args.mode);
    if (args.device != "cpu")
        throw foga::config_error("only --device cpu is supported, got " + args.device);
    if (const char* env_root = std::getenv("FOGA_DATA_ROOT"); env_root && *env_root)
        cfg.data_root = env_root;
    return cfg;
}

void write_snapshot(const foga::RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    json snap = foga::config_to_json(cfg);
    snap["version"] = kVersion;
    snap["config_hash"] = foga::config_hash(cfg);
    std::ofstream out(fs::path(out_dir) / "resolved_config.json");
    out << snap.dump(2) << "\n";
}

std::string require_data_root(const foga::RunConfig& cfg) {
    if (cfg.data_root.empty())
        throw foga::data_error(
            "no dataset path: set data_root in the config or FOGA_DATA_ROOT");
    if (!fs::exists(cfg.data_root))
        throw foga::data_error("dataset root does not exist: " + cfg.data_root);
    return cfg.data_root;
}

int cmd_synth(const CommonArgs& args) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    auto [train_set, test_set] = foga::synth_generate(cfg.synth);
    foga::write_dataset(train_set, args.out_dir);
    foga::write_dataset(test_set, args.out_dir);
    std::cout << "wrote " << train_set.videos.size() << " train / " << test_set.videos.size()
              << " test videos to " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_train(const CommonArgs& args) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    foga::DatasetIndex train_set;
    if (!cfg.data_root.empty()) {
        require_data_root(cfg);
        train_set = foga::load_dataset(cfg.data_root, foga::Split::Train);
    } else {
        std::cout << "no data_root given; training on the generated synthetic set\n";
        train_set = foga::synth_generate(cfg.synth).first;
    }
    auto [net, stats] = foga::train(cfg, train_set, args.out_dir, &std::cout);
    std::cout << "trained " << stats.steps << " steps, final loss " << stats.final_loss
              << "\ncheckpoint: " << (fs::path(args.out_dir) / "checkpoint_final.foga").string()
              << "\n";
    return kExitOk;
}

foga::LoadedCheckpoint load_model(const foga::RunConfig& cfg, const std::string& ckpt_path) {
    if (ckpt_path.empty()) throw foga::config_error("--checkpoint is required");
    return foga::load_checkpoint(ckpt_path, &cfg.model);
}

int cmd_score(const CommonArgs& args, const std::string& ckpt_path, bool dump_errors,
              bool dump_attention) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    auto ck = load_model(cfg, ckpt_path);
    foga::DatasetIndex test_set;
    if (!cfg.data_root.empty()) {
        require_data_root(cfg);
        test_set = foga::load_dataset(cfg.data_root, foga::Split::Test);
    } else {
        test_set = foga::synth_generate(cfg.synth).second;
    }
    const fs::path out(args.out_dir);
    for (const auto& video : test_set.videos) {
        if (video.frame_count() < cfg.model.t + cfg.model.sigma) {
            std::cerr << "skipping short video " << video.id << "\n";
            continue;
        }
        auto frames = foga::preprocess_video<float>(video, cfg.model.c_in, cfg.model.input_size);
        int dumped = 0;
        auto predict = [&](const foga::Tensor<float>& x) {
            auto pair = ck.net.forward(x, false);
            if (dump_attention && dumped == 0)
                foga::dump_attention_maps((out / "attention").string(), ck.net, video.id);
            ++dumped;
            return pair;
        };
        foga::ScoreSeries series = foga::score_video(frames, predict, cfg.model.t,
                                                     cfg.model.sigma, cfg.scoring, video.id);
        foga::write_score_csv((out / (video.id + "_scores.csv")).string(), series, video.labels);
        if (dump_errors) {
            fs::create_directories(out / "error_maps");
            const auto bases = foga::window_base_indices(
                static_cast<int>(frames.size()), cfg.model.t, cfg.model.sigma, 1);
            for (int b : bases) {
                auto x = foga::stack_window_inputs(frames, b, cfg.model.t);
                auto pair = ck.net.forward(x, false);
                auto e_i = foga::error_map(pair.immediate,
                                           frames[static_cast<std::size_t>(b + 1)]);
                auto e_f = foga::error_map(pair.forward,
                                           frames[static_cast<std::size_t>(b + cfg.model.sigma)],
                                           foga::Horizon::Forward);
                auto e = foga::hybrid_error(e_i, e_f, cfg.scoring.lambda);
                char name[64];
                std::snprintf(name, sizeof(name), "%s_f%05d_hybrid.npy", video.id.c_str(), b + 1);
                foga::write_npy((out / "error_maps" / name).string(),
                                foga::error_map_tensor(e));
            }
        }
        std::cout << "scored " << video.id << " (" << series.n_scored << " frames)\n";
    }
    return kExitOk;
}

int cmd_eval(const CommonArgs& args, const std::string& ckpt_path) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    auto ck = load_model(cfg, ckpt_path);
    foga::DatasetIndex test_set;
    if (!cfg.data_root.empty()) {
        require_data_root(cfg);
        test_set = foga::load_dataset(cfg.data_root, foga::Split::Test);
    } else {
        test_set = foga::synth_generate(cfg.synth).second;
    }
    foga::EvalResult result = foga::evaluate(ck.net, test_set, cfg);
    const fs::path out(args.out_dir);
    for (std::size_t i = 0; i < result.series.size(); ++i) {
        const auto& vid = result.series[i].video_id;
        const foga::VideoEntry* entry = nullptr;
        for (const auto& v : test_set.videos)
            if (v.id == vid) entry = &v;
        foga::write_score_csv((out / (vid + "_scores.csv")).string(), result.series[i],
                              entry ? entry->labels : std::vector<int>{});
    }
    std::ofstream js(out / "eval_report.json");
    js << foga::eval_report_to_json(result.report).dump(2) << "\n";
    std::cout << "micro AUC " << result.report.micro_auc;
    if (result.report.macro_auc) std::cout << ", macro AUC " << *result.report.macro_auc;
    std::cout << "\nreport: " << (out / "eval_report.json").string() << "\n";
    return kExitOk;
}

int cmd_bench(const CommonArgs& args, const std::string& ckpt_path, int frames) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    foga::FogaNet<float> net(cfg.model);
    if (!ckpt_path.empty()) {
        auto ck = load_model(cfg, ckpt_path);
        net = std::move(ck.net);
    } else {
        net.init_weights(cfg.train.seed);
    }
    foga::BenchRecord rec = foga::bench(net, cfg, frames);
    std::ofstream js(fs::path(args.out_dir) / "bench.json");
    js << foga::bench_record_to_json(rec).dump(2) << "\n";
    std::cout << "params " << rec.params << "  flops " << rec.flops << "\n"
              << "fps_plain " << rec.fps_plain << "  fps_pyramid " << rec.fps_pyramid
              << "  fps_model_only " << rec.fps_model_only << "\n";
    return kExitOk;
}

int cmd_ablate(const CommonArgs& args, const std::string& sweep_path) {
    foga::RunConfig cfg = resolve(args);
    write_snapshot(cfg, args.out_dir);
    json sweep = sweep_path.empty() ? foga::default_sweep() : foga::load_json_file(sweep_path);
    auto rows = foga::run_ablation(cfg, sweep, args.out_dir, &std::cout);
    std::cout << "name        cfa ega  params    flops        auc\n";
    for (const auto& r : rows) {
        std::printf("%-11s %-3d %-3d  %-9zu %-12.3e %.4f\n", r.name.c_str(), r.use_cfa,
                    r.use_ega, r.params, r.flops, r.micro_auc);
    }
    std::cout << "summary: " << (fs::path(args.out_dir) / "ablation_summary.csv").string()
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FoGA forward-consistency video anomaly detection"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::string ckpt_path, sweep_path;
    bool dump_errors = false, dump_attention = false;
    int bench_frames = 200;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config file");
        sub->add_option("--set", args.overrides, "dotted-key override, e.g. model.t=8")
            ->take_all();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--mode", args.mode, "scoring mode: plain|pyramid")
            ->check(CLI::IsMember({"plain", "pyramid"}));
        sub->add_option("--device", args.device, "compute device (cpu)");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth);
    std::string synth_seed;
    synth->add_option("--seed", synth_seed, "shorthand for --set synth.seed=N");

    CLI::App* train = app.add_subcommand("train", "train a model");
    add_common(train);

    CLI::App* score = app.add_subcommand("score", "score test videos to CSV");
    add_common(score);
    score->add_option("--checkpoint", ckpt_path, "trained checkpoint")->required();
    score->add_flag("--dump-error-maps", dump_errors, "export hybrid error maps (npy)");
    score->add_flag("--dump-attention", dump_attention, "export attention maps (npy)");

    CLI::App* eval = app.add_subcommand("eval", "evaluate frame-level AUC");
    add_common(eval);
    eval->add_option("--checkpoint", ckpt_path, "trained checkpoint")->required();

    CLI::App* bench = app.add_subcommand("bench", "measure throughput and budgets");
    add_common(bench);
    bench->add_option("--checkpoint", ckpt_path, "checkpoint (optional, random weights otherwise)");
    bench->add_option("--frames", bench_frames, "frames to time")->check(CLI::PositiveNumber);

    CLI::App* ablate = app.add_subcommand("ablate", "run the module/loss ablation grid");
    add_common(ablate);
    ablate->add_option("--sweep", sweep_path, "sweep JSON (defaults to the built-in grid)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!synth_seed.empty()) args.overrides.push_back("synth.seed=" + synth_seed);
        if (synth->parsed()) return cmd_synth(args);
        if (train->parsed()) return cmd_train(args);
        if (score->parsed()) return cmd_score(args, ckpt_path, dump_errors, dump_attention);
        if (eval->parsed()) return cmd_eval(args, ckpt_path);
        if (bench->parsed()) return cmd_bench(args, ckpt_path, bench_frames);
        if (ablate->parsed()) return cmd_ablate(args, sweep_path);
    } catch (const foga::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const foga::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
