#pragma once

#include <filesystem>
#include <string>

#include "tractionopt/config.hpp"

namespace tractionopt::testing {

inline std::filesystem::path source_dir()
{
    return TRACTIONOPT_SOURCE_DIR;
}

inline const PipelineConfig& default_config()
{
    static const PipelineConfig cfg = load_config(source_dir() / "config" / "default.json");
    return cfg;
}

/// Shared model so tests reuse simulated points.
inline const SystemModel& default_system()
{
    static const SystemModel sys(default_config().system);
    return sys;
}

}  // namespace tractionopt::testing
