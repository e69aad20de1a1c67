/**
 * @file scenario.hpp
 * @brief Scenario configuration, the deterministic closed-loop run, and the
 *        experiment matrix.
 */
#pragma once

#include "afw/autopilot.hpp"
#include "afw/metrics.hpp"
#include "afw/mission.hpp"
#include "afw/vehicle_sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace afw::scenario {

struct InitialCondition {
    Vec3 position = Vec3::Zero();
    double heading = 0.0;
    std::size_t target_index = 0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::filesystem::path source;
    std::filesystem::path aircraft_file;
    sim::AircraftParams aircraft;
    sim::Environment environment;
    mission::MissionPlan mission;
    InitialCondition initial;
    autopilot::AutopilotGains gains;
    autopilot::AdaptiveConfig adaptive;
    sim::FailureConfig failure;
    autopilot::PositionControllerConfig position;
    autopilot::RateLoopConfig rate;
    autopilot::KinematicsConvention kinematics = autopilot::KinematicsConvention::standard;
    /// Set when the config provides trim values; otherwise trim is solved.
    bool explicit_trim = false;
    double duration = 180.0;
    double dt = 0.004;
    int position_divider = 5;
    int mission_divider = 25;
    double metric_warmup = 0.0;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;

    /// Throws InputError on any invariant failure, including the
    /// meaningless (alpha_d = 0, adaptive off) combination.
    void validate() const;
};

/// RCAC hyperparameters used when a config leaves a loop unspecified.
autopilot::AdaptiveConfig default_adaptive_config(double sample_time = 0.004);

/// Reads a JSON scenario, resolving "include" lists (relative to the
/// including file, merged in order, the including file last) and the
/// aircraft parameter file.  Errors carry the offending file name.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Same as load_scenario for an already merged document.
ScenarioConfig parse_scenario(const nlohmann::json& doc, const std::filesystem::path& source = {});

/// Loads a JSON file and expands its includes into one document.
nlohmann::json load_document(const std::filesystem::path& path);

sim::AircraftParams parse_aircraft(const nlohmann::json& doc);
sim::AircraftParams load_aircraft(const std::filesystem::path& path);

enum class RunStatus { success, mission_incomplete, divergence, sim_fault };

std::string_view to_string(RunStatus s) noexcept;
int exit_code(RunStatus s) noexcept;

struct RunResult {
    std::string name;
    metrics::FlightLog log;
    std::optional<metrics::MetricReport> metrics;
    RunStatus status = RunStatus::success;
    std::string diagnostic;
    std::size_t waypoints_reached = 0;
    std::size_t waypoint_count = 0;
    double final_gain_norm = 0.0;
    double max_abs_roll = 0.0;
    double max_abs_pitch = 0.0;
};

/// Executes the fixed-order tick loop.  Never throws for simulator or RCAC
/// faults; those end the run with the matching status.
RunResult run_scenario(const ScenarioConfig& config);

/// Writes flight_log.csv, metrics.txt, gains.csv and gains.svg under dir.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir,
                       const metrics::MetricReport* normalized = nullptr);

enum class Execution { serial, parallel };

struct MatrixResult {
    std::vector<RunResult> runs;
    std::size_t benchmark_index = 0;
    std::vector<std::optional<metrics::MetricReport>> normalized;
};

/// Runs every config (OpenMP across configs for Execution::parallel) and
/// normalizes by the run named `benchmark`.  Throws InputError for an empty
/// list or a missing/duplicated benchmark and FaultError when the benchmark
/// run fails.
MatrixResult run_matrix(const std::vector<ScenarioConfig>& configs, const std::string& benchmark,
                        Execution exec = Execution::parallel);

/// Normalized comparison table as CSV text.
std::string comparison_table(const MatrixResult& result);

/// Writes each run's outputs plus comparison.csv, trajectory.svg and
/// gains.svg under dir.
void write_matrix_outputs(const MatrixResult& result, const std::filesystem::path& dir);

}  // namespace afw::scenario
