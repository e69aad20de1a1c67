/**
 * @file metrics.hpp
 * @brief Flight log records, their CSV form, and RMS tracking metrics.
 */
#pragma once

#include "afw/signals.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace afw::metrics {

inline constexpr int kAdaptiveLoops = 5;
inline constexpr int kGainSlots = 4;

/// One inner-loop tick.  Gain slots are (kp, ki, kd, kff); inactive slots
/// hold zero.  Loop order: pitch attitude, roll attitude, p, q, r.
struct LogRecord {
    double time = 0.0;
    double roll_s = 0.0, roll_m = 0.0;
    double pitch_s = 0.0, pitch_m = 0.0;
    double thrust_s = 0.0;
    double xtrack = 0.0;
    Vec3 omega_s = Vec3::Zero();
    Vec3 omega_m = Vec3::Zero();
    Vec3 alpha_s = Vec3::Zero();
    std::array<std::array<double, kGainSlots>, kAdaptiveLoops> theta{};
    SurfaceCommand command;
    double left_aileron = 0.0, right_aileron = 0.0;
    Vec3 position = Vec3::Zero();
    double yaw = 0.0;
    double airspeed = 0.0;
    int target_index = 0;
};

struct FlightLog {
    std::vector<LogRecord> records;

    bool empty() const noexcept { return records.empty(); }
    std::size_t size() const noexcept { return records.size(); }
};

/// Column names in file order; every name carries its unit suffix.
const std::vector<std::string>& csv_columns();

/// Header row plus one row per record, 9 significant digits, '\n' endings.
void write_csv(std::ostream& os, const FlightLog& log);
void write_csv(const std::string& path, const FlightLog& log);

/// Reads the columns needed for the metrics (time, attitude, cross-track)
/// from a CSV written by write_csv.  Other columns are parsed when present.
FlightLog read_csv(std::istream& is);
FlightLog read_csv(const std::string& path);

struct MetricReport {
    double j_phi = 0.0;
    double j_theta = 0.0;
    double j_traj = 0.0;
};

/// RMS bank, elevation and cross-track errors over every record whose time
/// is at least warmup seconds after the first record.
MetricReport compute_metrics(const FlightLog& log, double warmup = 0.0);

/// Elementwise division by a benchmark report with strictly positive entries.
MetricReport normalize(const MetricReport& report, const MetricReport& benchmark);

/// "key = value" lines with 9 significant digits.
std::string format_report(const MetricReport& raw, const MetricReport* normalized = nullptr);

}  // namespace afw::metrics
