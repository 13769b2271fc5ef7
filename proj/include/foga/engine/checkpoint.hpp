#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/engine/config.hpp"
#include "foga/model/backbone.hpp"

namespace foga {

namespace detail {
constexpr char kCkptMagic[8] = {'F', 'O', 'G', 'A', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw data_error("checkpoint: truncated file");
}
}  // namespace detail

/// Versioned checkpoint: model config, training step, and all parameters by
/// name.
inline void save_checkpoint(const std::string& path, FogaNet<float>& net, std::uint64_t step) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw runtime_failure("cannot write checkpoint: " + path);
    out.write(detail::kCkptMagic, sizeof(detail::kCkptMagic));
    detail::write_pod(out, detail::kCkptVersion);
    detail::write_pod(out, step);
    const std::string cfg = model_to_json(net.config()).dump();
    const std::uint32_t cfg_len = static_cast<std::uint32_t>(cfg.size());
    detail::write_pod(out, cfg_len);
    out.write(cfg.data(), cfg_len);
    auto params = net.parameters();
    const std::uint32_t n = static_cast<std::uint32_t>(params.size());
    detail::write_pod(out, n);
    for (const auto& p : params) {
        const std::uint32_t name_len = static_cast<std::uint32_t>(p.name.size());
        detail::write_pod(out, name_len);
        out.write(p.name.data(), name_len);
        const std::uint64_t count = p.param->value.size();
        detail::write_pod(out, count);
        out.write(reinterpret_cast<const char*>(p.param->value.data()),
                  static_cast<std::streamsize>(count * sizeof(float)));
    }
    if (!out) throw runtime_failure("checkpoint write failed: " + path);
}

struct LoadedCheckpoint {
    FogaNet<float> net;
    ModelConfig config;
    std::uint64_t step = 0;
};

/// Load a checkpoint. When `expected` is given, a differing embedded config
/// is a hard error.
inline LoadedCheckpoint load_checkpoint(const std::string& path,
                                        const ModelConfig* expected = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kCkptMagic, sizeof(magic)) != 0)
        throw data_error("not a checkpoint file: " + path);
    std::uint32_t version = 0;
    detail::read_pod(in, version);
    if (version != detail::kCkptVersion)
        throw data_error("unsupported checkpoint version " + std::to_string(version));
    LoadedCheckpoint ck;
    detail::read_pod(in, ck.step);
    std::uint32_t cfg_len = 0;
    detail::read_pod(in, cfg_len);
    std::string cfg_str(cfg_len, '\0');
    in.read(cfg_str.data(), cfg_len);
    if (!in) throw data_error("checkpoint: truncated config in " + path);
    ck.config = model_from_json(json::parse(cfg_str));
    if (expected && !(*expected == ck.config))
        throw config_error("checkpoint config mismatch for " + path +
                           ": stored " + model_to_json(ck.config).dump() +
                           ", expected " + model_to_json(*expected).dump());
    ck.net = FogaNet<float>(ck.config);
    auto params = ck.net.parameters();
    std::uint32_t n = 0;
    detail::read_pod(in, n);
    if (n != params.size())
        throw data_error("checkpoint parameter count mismatch in " + path);
    for (auto& p : params) {
        std::uint32_t name_len = 0;
        detail::read_pod(in, name_len);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint64_t count = 0;
        detail::read_pod(in, count);
        if (name != p.name || count != p.param->value.size())
            throw data_error("checkpoint layout mismatch at parameter " + name + " in " + path);
        in.read(reinterpret_cast<char*>(p.param->value.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
        if (!in) throw data_error("checkpoint: truncated tensor data in " + path);
    }
    return ck;
}

}  // namespace foga
