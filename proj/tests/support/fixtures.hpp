/**
 * @file fixtures.hpp
 * @brief Shared test fixtures: repository config paths and the desk aircraft.
 */
#pragma once

#include "afw/scenario.hpp"

#include <filesystem>

namespace afw::test {

inline std::filesystem::path config_dir() { return AFW_CONFIG_DIR; }

inline std::filesystem::path scenario_path(const std::string& name) {
    return config_dir() / "scenarios" / (name + ".json");
}

inline const sim::AircraftParams& small_uav() {
    static const sim::AircraftParams p = scenario::load_aircraft(config_dir() / "aircraft_small_uav.json");
    return p;
}

/// Scratch directory under the build tree, emptied on first use.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::path(AFW_SCRATCH_DIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace afw::test
