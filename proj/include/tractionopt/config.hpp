#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tractionopt/explorer.hpp"
#include "tractionopt/partial_load.hpp"
#include "tractionopt/system.hpp"

namespace tractionopt {

struct PipelineConfig {
    SystemConfig system;
    std::filesystem::path cycle_file;   // resolved against the config directory
    double sizing_frequency = 10e3;     // Hz, full-load sizing
    std::vector<double> ripple_grid;    // Hz, reported ripple-vs-f_sw search
    FswPolicy policy;                   // default partial-load policy
    int boundary_grid = 41;
    std::vector<FamilySpec> families;
    std::string canonical_json;         // normalised config text, hashed for the manifest
};

/// Strict parser: missing, mistyped or unknown keys raise ConfigError with
/// the dotted key path.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
PipelineConfig load_config(const std::filesystem::path& path);

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);

/// Hash of the canonical configuration text.
std::string config_hash(const PipelineConfig& config);

}  // namespace tractionopt
