#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"

namespace foga {

/// Minimal NPY v1.0 writer (little-endian float32, C order).
inline void write_npy(const std::string& path, const Tensor<float>& t) {
    std::string shape = "(";
    const int dims[4] = {t.n(), t.c(), t.h(), t.w()};
    for (int i = 0; i < 4; ++i) shape += std::to_string(dims[i]) + (i < 3 ? ", " : ")");
    std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape + ", }";
    const std::size_t unpadded = 10 + header.size() + 1;
    const std::size_t pad = (64 - unpadded % 64) % 64;
    header.append(pad, ' ');
    header.push_back('\n');

    std::ofstream out(path, std::ios::binary);
    if (!out) throw runtime_failure("cannot write npy: " + path);
    const unsigned char magic[8] = {0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0};
    out.write(reinterpret_cast<const char*>(magic), 8);
    const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
    out.write(reinterpret_cast<const char*>(&hlen), 2);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!out) throw runtime_failure("npy write failed: " + path);
}

}  // namespace foga
