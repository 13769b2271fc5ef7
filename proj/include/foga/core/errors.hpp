#pragma once

#include <stdexcept>
#include <string>

namespace foga {

/// Bad configuration: rejected values, incompatible model/checkpoint, etc.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad input data: missing files, undecodable frames, label mismatches.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Failure while running: divergent training, I/O failures mid-run.
struct runtime_failure : std::runtime_error {
    explicit runtime_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace foga
