/**
 * @file metrics.cpp
 * @brief FlightLog CSV I/O and RMS error metrics.
 */
#include "afw/metrics.hpp"

#include "afw/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace afw::metrics {

namespace {

constexpr const char* kLoopNames[kAdaptiveLoops] = {"pitch_att", "roll_att", "roll_rate", "pitch_rate", "yaw_rate"};
constexpr const char* kSlotNames[kGainSlots] = {"kp", "ki", "kd", "kff"};

std::vector<std::string> build_columns() {
    std::vector<std::string> c = {
        "time_s",        "roll_sp_rad",   "roll_rad",      "pitch_sp_rad",  "pitch_rad",
        "thrust_sp_1",   "xtrack_m",      "p_sp_rad_s",    "q_sp_rad_s",    "r_sp_rad_s",
        "p_rad_s",       "q_rad_s",       "r_rad_s",       "alpha_sp_x_rad_s2", "alpha_sp_y_rad_s2",
        "alpha_sp_z_rad_s2",
    };
    for (const char* loop : kLoopNames) {
        for (const char* slot : kSlotNames) c.push_back(std::string("theta_") + loop + "_" + slot + "_1");
    }
    for (const char* s : {"cmd_aileron_rad", "cmd_elevator_rad", "cmd_rudder_rad", "cmd_throttle_1",
                          "left_aileron_rad", "right_aileron_rad", "north_m", "east_m", "down_m", "yaw_rad",
                          "airspeed_m_s", "target_index_1"}) {
        c.emplace_back(s);
    }
    return c;
}

void append(std::string& line, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.9g", v);
    if (!line.empty()) line.push_back(',');
    line.append(buf, static_cast<std::size_t>(n));
}

std::vector<double> flatten(const LogRecord& r) {
    std::vector<double> v = {r.time,       r.roll_s,     r.roll_m,     r.pitch_s,    r.pitch_m,
                             r.thrust_s,   r.xtrack,     r.omega_s(0), r.omega_s(1), r.omega_s(2),
                             r.omega_m(0), r.omega_m(1), r.omega_m(2), r.alpha_s(0), r.alpha_s(1),
                             r.alpha_s(2)};
    for (const auto& loop : r.theta) v.insert(v.end(), loop.begin(), loop.end());
    v.insert(v.end(), {r.command.aileron, r.command.elevator, r.command.rudder, r.command.throttle,
                       r.left_aileron, r.right_aileron, r.position(0), r.position(1), r.position(2), r.yaw,
                       r.airspeed, static_cast<double>(r.target_index)});
    return v;
}

void unflatten(const std::vector<double>& v, LogRecord& r) {
    std::size_t i = 0;
    r.time = v[i++];
    r.roll_s = v[i++];
    r.roll_m = v[i++];
    r.pitch_s = v[i++];
    r.pitch_m = v[i++];
    r.thrust_s = v[i++];
    r.xtrack = v[i++];
    for (int k = 0; k < 3; ++k) r.omega_s(k) = v[i++];
    for (int k = 0; k < 3; ++k) r.omega_m(k) = v[i++];
    for (int k = 0; k < 3; ++k) r.alpha_s(k) = v[i++];
    for (auto& loop : r.theta) {
        for (auto& g : loop) g = v[i++];
    }
    r.command.aileron = v[i++];
    r.command.elevator = v[i++];
    r.command.rudder = v[i++];
    r.command.throttle = v[i++];
    r.left_aileron = v[i++];
    r.right_aileron = v[i++];
    for (int k = 0; k < 3; ++k) r.position(k) = v[i++];
    r.yaw = v[i++];
    r.airspeed = v[i++];
    r.target_index = static_cast<int>(v[i++]);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> columns = build_columns();
    return columns;
}

void write_csv(std::ostream& os, const FlightLog& log) {
    std::string line;
    for (const auto& c : csv_columns()) {
        if (!line.empty()) line.push_back(',');
        line += c;
    }
    os << line << '\n';
    for (const auto& r : log.records) {
        line.clear();
        for (double v : flatten(r)) append(line, v);
        os << line << '\n';
    }
}

void write_csv(const std::string& path, const FlightLog& log) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    write_csv(os, log);
}

FlightLog read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("flight log: missing header row");
    const auto header = split(line);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    for (const char* needed : {"time_s", "roll_sp_rad", "roll_rad", "pitch_sp_rad", "pitch_rad", "xtrack_m"}) {
        if (!index.count(needed)) throw InputError(std::string("flight log: missing column ") + needed);
    }

    const auto& columns = csv_columns();
    FlightLog log;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw InputError("flight log: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                             " cells, header has " + std::to_string(header.size()));
        }
        std::vector<double> values(columns.size(), 0.0);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto it = index.find(columns[c]);
            if (it == index.end()) continue;
            const std::string& cell = cells[it->second];
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{}) {
                throw InputError("flight log: bad number '" + cell + "' in row " + std::to_string(row));
            }
            values[c] = v;
        }
        LogRecord r;
        unflatten(values, r);
        log.records.push_back(r);
    }
    return log;
}

FlightLog read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open flight log '" + path + "'");
    return read_csv(is);
}

MetricReport compute_metrics(const FlightLog& log, double warmup) {
    if (log.empty()) throw InputError("compute_metrics: empty flight log");
    if (!(warmup >= 0.0)) throw InputError("compute_metrics: warm-up must be >= 0");

    const double t0 = log.records.front().time + warmup;
    double sum_phi = 0.0, sum_theta = 0.0, sum_traj = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        if (i > 0 && !(r.time > log.records[i - 1].time)) {
            throw InputError("compute_metrics: time is not strictly increasing at record " + std::to_string(i));
        }
        if (r.time < t0) continue;
        const double e_phi = r.roll_s - r.roll_m;
        const double e_theta = r.pitch_s - r.pitch_m;
        sum_phi += e_phi * e_phi;
        sum_theta += e_theta * e_theta;
        sum_traj += r.xtrack * r.xtrack;
        ++n;
    }
    if (n == 0) throw InputError("compute_metrics: warm-up excludes every record");
    const double inv = 1.0 / static_cast<double>(n);
    return {std::sqrt(sum_phi * inv), std::sqrt(sum_theta * inv), std::sqrt(sum_traj * inv)};
}

MetricReport normalize(const MetricReport& report, const MetricReport& benchmark) {
    if (!(benchmark.j_phi > 0.0) || !(benchmark.j_theta > 0.0) || !(benchmark.j_traj > 0.0)) {
        throw InputError("normalize: benchmark metrics must all be positive");
    }
    return {report.j_phi / benchmark.j_phi, report.j_theta / benchmark.j_theta, report.j_traj / benchmark.j_traj};
}

std::string format_report(const MetricReport& raw, const MetricReport* normalized) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "j_phi_rad = %.9g\nj_theta_rad = %.9g\nj_traj_m = %.9g\n", raw.j_phi,
                  raw.j_theta, raw.j_traj);
    out += buf;
    if (normalized) {
        std::snprintf(buf, sizeof buf, "j_phi_normalized = %.9g\nj_theta_normalized = %.9g\nj_traj_normalized = %.9g\n",
                      normalized->j_phi, normalized->j_theta, normalized->j_traj);
        out += buf;
    }
    return out;
}

}  // namespace afw::metrics
