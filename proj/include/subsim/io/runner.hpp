#pragma once

#include "subsim/io/config.hpp"

namespace subsim::io {

inline constexpr const char* kVersion = "subsim 0.1.0";

// Executes one scenario. Returns the process exit code:
// 0 ok, 2 schema violation, 3 numerical failure, 4 I/O failure.
// A manifest is written for every attempt that gets past config validation.
int run_experiment(const std::string& config_path,
                   const std::string& output_dir_override = "");

// Prints the schema report for a config; returns 0 iff valid.
int validate_config(const std::string& config_path);

}  // namespace subsim::io
