/**
 * @file scenario.cpp
 * @brief Config loading, the closed-loop tick loop and the experiment matrix.
 */
#include "afw/scenario.hpp"

#include "afw/errors.hpp"
#include "afw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace afw::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) throw InputError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("missing required key '") + key + "'");
    return get_number(j, key, 0.0);
}

Vec3 get_vec3(const json& j, const char* key, const Vec3& fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 3) throw InputError(std::string("'") + key + "' must be a 3-element array");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw InputError(std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

json read_json_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

json expand(const fs::path& path, std::set<fs::path>& stack) {
    const fs::path canonical = fs::weakly_canonical(path);
    if (stack.count(canonical)) throw InputError("include cycle at '" + path.string() + "'");
    stack.insert(canonical);

    json doc = read_json_file(path);
    if (!doc.is_object()) throw InputError(path.string() + ": top level must be an object");
    const fs::path dir = canonical.parent_path();

    // Paths are relative to the file that names them.
    if (doc.contains("aircraft") && doc["aircraft"].is_string()) {
        doc["aircraft"] = (dir / doc["aircraft"].get<std::string>()).lexically_normal().string();
    }

    json merged = json::object();
    if (doc.contains("include")) {
        const auto& inc = doc["include"];
        if (!inc.is_array()) throw InputError(path.string() + ": 'include' must be an array of paths");
        for (const auto& item : inc) {
            if (!item.is_string()) throw InputError(path.string() + ": include entries must be strings");
            merged.merge_patch(expand(dir / item.get<std::string>(), stack));
        }
        doc.erase("include");
    }
    merged.merge_patch(doc);
    stack.erase(canonical);
    return merged;
}

rcac::Hyperparams parse_loop(const json& j, rcac::Hyperparams h) {
    const json merged = j;
    if (merged.contains("parameterization")) {
        h.parameterization = rcac::parse_parameterization(merged["parameterization"].get<std::string>());
    }
    h.p0 = get_number(merged, "p0", h.p0);
    h.r_u = get_number(merged, "r_u", h.r_u);
    h.r_z = get_number(merged, "r_z", h.r_z);
    h.sigma = get_number(merged, "sigma", h.sigma);
    h.integrator_clamp = get_number(merged, "integrator_clamp", h.integrator_clamp);
    const int n = rcac::gain_count(h.parameterization);
    if (merged.contains("theta0")) {
        const auto& t = merged["theta0"];
        if (!t.is_array()) throw InputError("rcac: theta0 must be an array");
        h.theta0 = rcac::Vector(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i) h.theta0(static_cast<Eigen::Index>(i)) = t[i].get<double>();
    } else if (h.theta0.size() != n) {
        h.theta0 = rcac::Vector::Zero(n);
    }
    return h;
}

void apply_loop_defaults(const json& defaults, rcac::Hyperparams& h) {
    h = parse_loop(defaults, h);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

autopilot::AdaptiveConfig default_adaptive_config(double sample_time) {
    using rcac::Hyperparams;
    using rcac::Parameterization;
    autopilot::AdaptiveConfig c;
    c.pitch = Hyperparams::with(Parameterization::PI, 0.01, 0.001, sample_time);
    c.roll = Hyperparams::with(Parameterization::PI, 1.0, 0.001, sample_time);
    c.rate[0] = Hyperparams::with(Parameterization::PI, 0.001, 0.1, sample_time);
    c.rate[1] = Hyperparams::with(Parameterization::PI, 1000.0, 0.1, sample_time);
    c.rate[2] = Hyperparams::with(Parameterization::PI, 0.001, 0.1, sample_time);
    for (auto* h : {&c.pitch, &c.roll, &c.rate[0], &c.rate[1], &c.rate[2]}) {
        h->sigma = -1.0;
        h->integrator_clamp = 0.2;
    }
    return c;
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw InputError("scenario: name must not be empty");
    if (!(duration > 0.0)) throw InputError("scenario '" + name + "': duration must be positive");
    if (!(dt > 0.0) || dt > 0.02) throw InputError("scenario '" + name + "': dt must lie in (0, 0.02]");
    if (position_divider < 1 || mission_divider < 1) throw InputError("scenario '" + name + "': loop dividers must be >= 1");
    aircraft.validate();
    mission.validate();
    if (initial.target_index >= mission.waypoints.size()) {
        throw InputError("scenario '" + name + "': initial target index out of range");
    }
    gains.validate();
    failure.validate(aircraft.surface_limit);
    for (const auto* h : {&adaptive.pitch, &adaptive.roll, &adaptive.rate[0], &adaptive.rate[1], &adaptive.rate[2]}) {
        h->validate();
    }
    if (failure.alpha_d == 0.0 && adaptive.mode == autopilot::AdaptiveMode::off) {
        throw InputError("scenario '" + name + "': alpha_d = 0 with the adaptive autopilot off commands nothing");
    }
    if (!(metric_warmup >= 0.0) || metric_warmup >= duration) {
        throw InputError("scenario '" + name + "': metric warm-up must lie in [0, duration)");
    }
}

sim::AircraftParams parse_aircraft(const json& j) {
    sim::AircraftParams p;
    p.name = get_string(j, "name", p.name);
    p.mass = require_number(j, "mass_kg");
    p.inertia = get_vec3(j, "inertia_kg_m2", p.inertia);
    p.wing_area = require_number(j, "wing_area_m2");
    p.span = require_number(j, "span_m");
    p.chord = require_number(j, "chord_m");
    p.air_density = get_number(j, "air_density_kg_m3", p.air_density);
    p.thrust_max = require_number(j, "thrust_max_n");
    p.v_trim_true = require_number(j, "v_trim_true_m_s");
    p.v_trim_indicated = get_number(j, "v_trim_indicated_m_s", p.v_trim_true);
    p.surface_limit = get_number(j, "surface_limit_deg", 30.0) * kDegToRad;
    p.alpha_limit = get_number(j, "alpha_limit_deg", 20.0) * kDegToRad;
    p.surface_time_constant = get_number(j, "surface_time_constant_s", p.surface_time_constant);
    p.throttle_time_constant = get_number(j, "throttle_time_constant_s", p.throttle_time_constant);

    if (!j.contains("aero")) throw InputError("aircraft: missing 'aero' block");
    const json& a = j["aero"];
    auto& c = p.aero;
    c.cl0 = get_number(a, "cl0", 0);
    c.cl_alpha = get_number(a, "cl_alpha", 0);
    c.cl_q = get_number(a, "cl_q", 0);
    c.cl_elevator = get_number(a, "cl_elevator", 0);
    c.cd0 = get_number(a, "cd0", 0);
    c.cd_k = get_number(a, "cd_k", 0);
    c.cy_beta = get_number(a, "cy_beta", 0);
    c.cy_p = get_number(a, "cy_p", 0);
    c.cy_r = get_number(a, "cy_r", 0);
    c.cy_rudder = get_number(a, "cy_rudder", 0);
    c.croll_beta = get_number(a, "croll_beta", 0);
    c.croll_p = get_number(a, "croll_p", 0);
    c.croll_r = get_number(a, "croll_r", 0);
    c.croll_aileron = get_number(a, "croll_aileron", 0);
    c.croll_rudder = get_number(a, "croll_rudder", 0);
    c.cm0 = get_number(a, "cm0", 0);
    c.cm_alpha = get_number(a, "cm_alpha", 0);
    c.cm_q = get_number(a, "cm_q", 0);
    c.cm_elevator = get_number(a, "cm_elevator", 0);
    c.cn_beta = get_number(a, "cn_beta", 0);
    c.cn_p = get_number(a, "cn_p", 0);
    c.cn_r = get_number(a, "cn_r", 0);
    c.cn_aileron = get_number(a, "cn_aileron", 0);
    c.cn_rudder = get_number(a, "cn_rudder", 0);

    if (!j.contains("allocation")) throw InputError("aircraft: missing 'allocation' block");
    const json& al = j["allocation"];
    p.allocation.aileron = require_number(al, "aileron_rad_per_rad_s2");
    p.allocation.elevator = require_number(al, "elevator_rad_per_rad_s2");
    p.allocation.rudder = require_number(al, "rudder_rad_per_rad_s2");
    p.validate();
    return p;
}

sim::AircraftParams load_aircraft(const fs::path& path) {
    try {
        return parse_aircraft(read_json_file(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

json load_document(const fs::path& path) {
    std::set<fs::path> stack;
    return expand(path, stack);
}

ScenarioConfig parse_scenario(const json& doc, const fs::path& source) {
    ScenarioConfig c;
    c.source = source;
    c.name = get_string(doc, "name", source.empty() ? c.name : source.stem().string());

    if (!doc.contains("aircraft") || !doc["aircraft"].is_string()) {
        throw InputError("scenario: 'aircraft' must name an aircraft parameter file");
    }
    c.aircraft_file = doc["aircraft"].get<std::string>();
    if (!fs::exists(c.aircraft_file)) throw InputError("scenario: aircraft file '" + c.aircraft_file.string() + "' not found");
    c.aircraft = load_aircraft(c.aircraft_file);

    c.duration = get_number(doc, "duration_s", c.duration);
    c.dt = get_number(doc, "dt_s", c.dt);
    c.position_divider = static_cast<int>(get_number(doc, "position_divider", c.position_divider));
    c.mission_divider = static_cast<int>(get_number(doc, "mission_divider", c.mission_divider));
    c.seed = static_cast<std::uint64_t>(get_number(doc, "seed", 0.0));
    c.output_dir = get_string(doc, "output_dir", c.output_dir.string());
    c.environment.wind = get_vec3(doc, "wind_m_s", Vec3::Zero());

    const std::string kin = get_string(doc, "kinematics", "standard");
    if (kin == "standard") {
        c.kinematics = autopilot::KinematicsConvention::standard;
    } else if (kin == "literal_plus_sin") {
        c.kinematics = autopilot::KinematicsConvention::literal_plus_sin;
    } else {
        throw InputError("scenario: unknown kinematics convention '" + kin + "'");
    }

    // Gains
    c.gains.v_trim_true = c.aircraft.v_trim_true;
    c.gains.v_trim_indicated = c.aircraft.v_trim_indicated;
    if (doc.contains("gains")) {
        const json& g = doc["gains"];
        c.gains.k_theta = get_number(g, "k_theta", 0.0);
        c.gains.k_phi = get_number(g, "k_phi", 0.0);
        c.gains.k_ff = get_vec3(g, "k_ff", Vec3::Zero());
        c.gains.k_p = get_vec3(g, "k_p", Vec3::Zero());
        c.gains.k_i = get_vec3(g, "k_i", Vec3::Zero());
        c.gains.v_trim_true = get_number(g, "v_trim_true_m_s", c.gains.v_trim_true);
        c.gains.v_trim_indicated = get_number(g, "v_trim_indicated_m_s", c.gains.v_trim_indicated);
    }

    // Adaptive
    c.adaptive = default_adaptive_config(c.dt);
    if (doc.contains("adaptive")) {
        const auto& a = doc["adaptive"];
        if (a.is_boolean()) {
            c.adaptive.mode = a.get<bool>() ? autopilot::AdaptiveMode::on : autopilot::AdaptiveMode::off;
        } else {
            c.adaptive.mode = autopilot::parse_adaptive_mode(a.get<std::string>());
        }
    }
    if (doc.contains("rcac")) {
        const json& r = doc["rcac"];
        if (r.contains("defaults")) {
            for (auto* h : {&c.adaptive.pitch, &c.adaptive.roll, &c.adaptive.rate[0], &c.adaptive.rate[1],
                            &c.adaptive.rate[2]}) {
                apply_loop_defaults(r["defaults"], *h);
            }
        }
        const std::pair<const char*, rcac::Hyperparams*> loops[] = {
            {"pitch", &c.adaptive.pitch},         {"roll", &c.adaptive.roll},
            {"roll_rate", &c.adaptive.rate[0]},   {"pitch_rate", &c.adaptive.rate[1]},
            {"yaw_rate", &c.adaptive.rate[2]},
        };
        for (const auto& [key, h] : loops) {
            if (r.contains(key)) *h = parse_loop(r[key], *h);
        }
    }
    for (auto* h : {&c.adaptive.pitch, &c.adaptive.roll, &c.adaptive.rate[0], &c.adaptive.rate[1], &c.adaptive.rate[2]}) {
        h->sample_time = c.dt;
    }

    // Failure
    c.failure.alpha_d = get_number(doc, "alpha_d", 1.0);
    if (doc.contains("failure")) {
        const json& f = doc["failure"];
        if (f.contains("stuck_surface") && !f["stuck_surface"].is_null()) {
            c.failure.stuck_surface = sim::parse_surface(f["stuck_surface"].get<std::string>());
        }
        c.failure.stuck_angle = get_number(f, "stuck_angle_rad", 0.0);
        c.failure.stuck_time = get_number(f, "stuck_time_s", 0.0);
    }

    // Mission
    if (!doc.contains("mission")) throw InputError("scenario: missing 'mission' block");
    const json& m = doc["mission"];
    c.mission.loop = m.value("loop", true);
    const double default_speed = get_number(m, "airspeed_m_s", c.aircraft.v_trim_true);
    const double default_radius = get_number(m, "acceptance_radius_m", 25.0);
    if (!m.contains("waypoints") || !m["waypoints"].is_array()) throw InputError("scenario: mission needs 'waypoints'");
    for (const auto& w : m["waypoints"]) {
        mission::Waypoint wp;
        wp.position = get_vec3(w, "ned_m", Vec3::Zero());
        wp.airspeed_s = get_number(w, "airspeed_m_s", default_speed);
        wp.acceptance_radius = get_number(w, "acceptance_radius_m", default_radius);
        c.mission.waypoints.push_back(wp);
    }

    if (doc.contains("initial")) {
        const json& i = doc["initial"];
        c.initial.position = get_vec3(i, "ned_m", Vec3::Zero());
        c.initial.heading = get_number(i, "heading_deg", 0.0) * kDegToRad;
        c.initial.target_index = static_cast<std::size_t>(get_number(i, "target_index", 0.0));
    } else if (!c.mission.waypoints.empty()) {
        c.initial.position = c.mission.waypoints.front().position;
    }

    // Position controller
    if (doc.contains("position_controller")) {
        const json& p = doc["position_controller"];
        auto& pc = c.position;
        pc.l1_distance = get_number(p, "l1_distance_m", pc.l1_distance);
        pc.roll_limit = get_number(p, "roll_limit_deg", 45.0) * kDegToRad;
        pc.pitch_limit = get_number(p, "pitch_limit_deg", 30.0) * kDegToRad;
        pc.energy_rate_gain = get_number(p, "energy_rate_gain", pc.energy_rate_gain);
        pc.energy_rate_limit = get_number(p, "energy_rate_limit_m_s", pc.energy_rate_limit);
        pc.thrust_p = get_number(p, "thrust_p", pc.thrust_p);
        pc.thrust_i = get_number(p, "thrust_i", pc.thrust_i);
        pc.thrust_integral_limit = get_number(p, "thrust_integral_limit", pc.thrust_integral_limit);
        pc.pitch_balance_p = get_number(p, "pitch_balance_p", pc.pitch_balance_p);
        pc.pitch_balance_d = get_number(p, "pitch_balance_d", pc.pitch_balance_d);
        if (p.contains("pitch_trim_deg") && p.contains("thrust_trim")) {
            pc.pitch_trim = get_number(p, "pitch_trim_deg", 0.0) * kDegToRad;
            pc.thrust_trim = get_number(p, "thrust_trim", 0.5);
            c.explicit_trim = true;
        }
    }
    c.position.sample_time = c.dt * c.position_divider;

    if (doc.contains("rate_loop")) {
        const json& r = doc["rate_loop"];
        c.rate.integral_limit = get_number(r, "integral_limit_rad", c.rate.integral_limit);
        c.rate.min_scaling_airspeed = get_number(r, "min_scaling_airspeed_m_s", c.rate.min_scaling_airspeed);
    }
    c.rate.sample_time = c.dt;

    if (doc.contains("metrics")) c.metric_warmup = get_number(doc["metrics"], "warmup_s", 0.0);

    c.validate();
    return c;
}

ScenarioConfig load_scenario(const fs::path& path) {
    try {
        return parse_scenario(load_document(path), path);
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind(path.string(), 0) == 0) throw;
        throw InputError(path.string() + ": " + what);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

std::string_view to_string(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::success: return "success";
        case RunStatus::mission_incomplete: return "mission_incomplete";
        case RunStatus::divergence: return "divergence";
        case RunStatus::sim_fault: return "sim_fault";
    }
    return "?";
}

int exit_code(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::success: return 0;
        case RunStatus::mission_incomplete: return 3;
        case RunStatus::divergence: return 4;
        case RunStatus::sim_fault: return 5;
    }
    return 1;
}

namespace {

void copy_gains(const rcac::Loop& loop, std::array<double, metrics::kGainSlots>& slots) {
    slots.fill(0.0);
    const auto& theta = loop.state().theta;
    for (Eigen::Index i = 0; i < theta.size(); ++i) slots[static_cast<std::size_t>(i)] = theta(i);
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    config.validate();

    RunResult result;
    result.name = config.name;
    result.waypoint_count = config.mission.waypoints.size();

    const auto& params = config.aircraft;
    const double cruise_speed = config.mission.waypoints[config.initial.target_index].airspeed_s;
    const sim::TrimPoint trim = sim::find_trim(params, cruise_speed, -config.initial.position(2));

    autopilot::PositionControllerConfig position_cfg = config.position;
    if (!config.explicit_trim) {
        position_cfg.pitch_trim = trim.alpha;
        position_cfg.thrust_trim = trim.throttle;
    }

    sim::AircraftState state = trim.state;
    const double heading = config.initial.heading;
    state.r = config.initial.position;
    state.euler(2) = heading;
    state.v = Vec3(std::cos(heading), std::sin(heading), 0.0) * cruise_speed;
    sim::ActuatorState act = trim.actuators;

    const autopilot::AutopilotGains gains = autopilot::detune_gains(config.gains, config.failure.alpha_d);
    autopilot::AdaptiveSet adaptive(config.adaptive);
    autopilot::RateLoopState rate_state;
    autopilot::PositionControllerState position_state;
    const autopilot::Allocation alloc{params.allocation.aileron, params.allocation.elevator,
                                      params.allocation.rudder, params.surface_limit};

    std::size_t target = config.initial.target_index;
    std::vector<bool> reached(config.mission.waypoints.size(), false);
    mission::MissionUpdate mission_sp;
    autopilot::AttitudeSetpoint att_sp;

    const auto ticks = static_cast<std::int64_t>(std::llround(config.duration / config.dt));
    result.log.records.reserve(static_cast<std::size_t>(ticks));

    try {
        for (std::int64_t k = 0; k < ticks; ++k) {
            const double t = static_cast<double>(k) * config.dt;
            const Measurements meas = sim::read_sensors(state, config.environment);

            if (k % config.mission_divider == 0) {
                mission_sp = mission::advance_mission(config.mission, meas.nav.r_m, target);
                if (mission_sp.advanced) reached[target] = true;
                target = mission_sp.active_index;
            }
            if (k % config.position_divider == 0) {
                att_sp = autopilot::position_controller(mission_sp.r_s, mission_sp.airspeed_s, meas.nav,
                                                        mission_sp.segment, position_cfg, position_state);
            }

            const auto rates = autopilot::attitude_outer_loop(att_sp, meas.att, gains, adaptive);
            const double yaw_rate = autopilot::coordinated_turn_rate(att_sp.roll_s, att_sp.pitch_s, meas.att.v_true);
            const Vec3 omega_s = autopilot::euler_rates_to_body(meas.att.pitch_m, meas.att.roll_m,
                                                                Vec3(rates.roll_rate_s, rates.pitch_rate_s, yaw_rate),
                                                                config.kinematics);
            const Vec3 alpha_s = autopilot::rate_loop(omega_s, meas.att, gains, config.rate, rate_state, adaptive);
            const SurfaceCommand cmd = autopilot::allocate_controls(alpha_s, att_sp.thrust_s, alloc);

            metrics::LogRecord rec;
            rec.time = t;
            rec.roll_s = att_sp.roll_s;
            rec.roll_m = meas.att.roll_m;
            rec.pitch_s = att_sp.pitch_s;
            rec.pitch_m = meas.att.pitch_m;
            rec.thrust_s = att_sp.thrust_s;
            rec.xtrack = mission::cross_track_error(meas.nav.r_m, config.mission);
            rec.omega_s = omega_s;
            rec.omega_m = meas.att.omega_m;
            rec.alpha_s = alpha_s;
            copy_gains(adaptive.pitch(), rec.theta[0]);
            copy_gains(adaptive.roll(), rec.theta[1]);
            for (int axis = 0; axis < 3; ++axis) copy_gains(adaptive.rate(axis), rec.theta[2 + axis]);
            rec.command = cmd;
            rec.left_aileron = act.left_aileron;
            rec.right_aileron = act.right_aileron;
            rec.position = state.r;
            rec.yaw = state.euler(2);
            rec.airspeed = meas.att.v_true;
            rec.target_index = static_cast<int>(target);
            result.log.records.push_back(rec);
            result.max_abs_roll = std::max(result.max_abs_roll, std::abs(rec.roll_m));
            result.max_abs_pitch = std::max(result.max_abs_pitch, std::abs(rec.pitch_m));

            act = sim::apply_actuators(cmd, act, config.failure, t, config.dt);
            state = sim::step_dynamics(state, act, params, config.dt, config.environment, k);
        }
    } catch (const DivergenceError& e) {
        result.status = RunStatus::divergence;
        result.diagnostic = e.what();
    } catch (const FaultError& e) {
        result.status = RunStatus::sim_fault;
        result.diagnostic = e.what();
    } catch (const InputError& e) {
        // Non-finite or out-of-envelope signals inside the loop mean the
        // closed loop has already left the valid flight regime.
        result.status = RunStatus::sim_fault;
        result.diagnostic = std::string(e.what()) + " (t = " +
                            std::to_string(result.log.empty() ? 0.0 : result.log.records.back().time) + " s)";
    }

    result.waypoints_reached = static_cast<std::size_t>(std::count(reached.begin(), reached.end(), true));
    result.final_gain_norm = adaptive.total_gain_norm();
    if (result.status == RunStatus::success && result.waypoints_reached < reached.size()) {
        result.status = RunStatus::mission_incomplete;
        result.diagnostic = "reached " + std::to_string(result.waypoints_reached) + " of " +
                            std::to_string(reached.size()) + " waypoints";
    }
    if (!result.log.empty() && result.log.records.back().time >= config.metric_warmup) {
        result.metrics = metrics::compute_metrics(result.log, config.metric_warmup);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kLoopLabels[metrics::kAdaptiveLoops] = {"pitch attitude", "roll attitude", "roll rate",
                                                              "pitch rate", "yaw rate"};
constexpr int kPlotDecimation = 25;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write '" + path.string() + "'");
    os << text;
}

std::vector<plot::Panel> gain_panels(const std::vector<const RunResult*>& runs) {
    std::vector<plot::Panel> panels;
    for (int loop = 0; loop < metrics::kAdaptiveLoops; ++loop) {
        plot::Panel p;
        p.title = std::string("RCAC gains: ") + kLoopLabels[loop];
        p.x_label = "time [s]";
        p.y_label = "gain";
        for (const RunResult* run : runs) {
            for (int slot = 0; slot < 2; ++slot) {
                plot::Series s;
                s.label = run->name + (slot == 0 ? " kp" : " ki");
                s.dashed = slot == 1;
                for (std::size_t i = 0; i < run->log.size(); i += kPlotDecimation) {
                    const auto& r = run->log.records[i];
                    s.x.push_back(r.time);
                    s.y.push_back(r.theta[static_cast<std::size_t>(loop)][static_cast<std::size_t>(slot)]);
                }
                p.series.push_back(std::move(s));
            }
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

plot::Panel trajectory_panel(const std::vector<const RunResult*>& runs) {
    plot::Panel p;
    p.title = "Top-down trajectory";
    p.x_label = "east [m]";
    p.y_label = "north [m]";
    p.equal_aspect = true;
    for (const RunResult* run : runs) {
        plot::Series s;
        s.label = run->name;
        for (std::size_t i = 0; i < run->log.size(); i += kPlotDecimation) {
            s.x.push_back(run->log.records[i].position(1));
            s.y.push_back(run->log.records[i].position(0));
        }
        p.series.push_back(std::move(s));
    }
    return p;
}

std::string gains_csv(const RunResult& run) {
    std::string out = "time_s";
    const char* loops[] = {"pitch_att", "roll_att", "roll_rate", "pitch_rate", "yaw_rate"};
    for (const char* l : loops) out += std::string(",") + l + "_kp_1," + l + "_ki_1";
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < run.log.size(); i += kPlotDecimation) {
        const auto& r = run.log.records[i];
        std::snprintf(buf, sizeof buf, "%.9g", r.time);
        out += buf;
        for (const auto& loop : r.theta) {
            for (int slot = 0; slot < 2; ++slot) {
                std::snprintf(buf, sizeof buf, ",%.9g", loop[static_cast<std::size_t>(slot)]);
                out += buf;
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace

void write_run_outputs(const RunResult& result, const fs::path& dir, const metrics::MetricReport* normalized) {
    fs::create_directories(dir);
    metrics::write_csv((dir / "flight_log.csv").string(), result.log);

    std::string summary = "name = " + result.name + "\nstatus = " + std::string(to_string(result.status)) + "\n";
    if (!result.diagnostic.empty()) summary += "diagnostic = " + result.diagnostic + "\n";
    summary += "records = " + std::to_string(result.log.size()) + "\n";
    summary += "waypoints_reached = " + std::to_string(result.waypoints_reached) + " / " +
               std::to_string(result.waypoint_count) + "\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "final_gain_norm_sum = %.9g\n", result.final_gain_norm);
    summary += buf;
    std::snprintf(buf, sizeof buf, "max_abs_roll_deg = %.6g\nmax_abs_pitch_deg = %.6g\n",
                  result.max_abs_roll / kDegToRad, result.max_abs_pitch / kDegToRad);
    summary += buf;
    if (result.metrics) summary += metrics::format_report(*result.metrics, normalized);
    write_text(dir / "metrics.txt", summary);

    write_text(dir / "gains.csv", gains_csv(result));
    write_text(dir / "gains.svg", plot::render_svg(gain_panels({&result})));
    write_text(dir / "trajectory.svg", plot::render_svg({trajectory_panel({&result})}, 720.0, 640.0));
}

MatrixResult run_matrix(const std::vector<ScenarioConfig>& configs, const std::string& benchmark,
                        Execution exec) {
    if (configs.empty()) throw InputError("run_matrix: no scenarios given");
    std::optional<std::size_t> bench;
    std::set<std::string> names;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!names.insert(configs[i].name).second) {
            throw InputError("run_matrix: duplicate scenario name '" + configs[i].name + "'");
        }
        if (configs[i].name == benchmark) bench = i;
    }
    if (!bench) throw InputError("run_matrix: benchmark '" + benchmark + "' is not among the scenarios");

    MatrixResult out;
    out.benchmark_index = *bench;
    out.runs.resize(configs.size());
    const auto n = static_cast<std::int64_t>(configs.size());

    if (exec == Execution::parallel) {
        std::vector<std::string> errors(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                out.runs[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)]);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        }
        for (const auto& e : errors) {
            if (!e.empty()) throw InputError(e);
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            out.runs[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)]);
        }
    }

    const RunResult& b = out.runs[*bench];
    if (b.status != RunStatus::success || !b.metrics) {
        throw FaultError("benchmark run '" + b.name + "' failed: " + std::string(to_string(b.status)) +
                             (b.diagnostic.empty() ? "" : " (" + b.diagnostic + ")"),
                         b.log.empty() ? 0 : static_cast<std::int64_t>(b.log.size()));
    }
    for (const auto& run : out.runs) {
        if (run.metrics) {
            out.normalized.push_back(metrics::normalize(*run.metrics, *b.metrics));
        } else {
            out.normalized.push_back(std::nullopt);
        }
    }
    return out;
}

std::string comparison_table(const MatrixResult& result) {
    std::string out = "scenario,status,j_phi_rad,j_theta_rad,j_traj_m,j_phi_norm,j_theta_norm,j_traj_norm,gain_norm_sum\n";
    char buf[256];
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const auto& run = result.runs[i];
        out += run.name + (i == result.benchmark_index ? " (benchmark)" : "") + "," +
               std::string(to_string(run.status));
        if (run.metrics && result.normalized[i]) {
            const auto& m = *run.metrics;
            const auto& nm = *result.normalized[i];
            std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", m.j_phi, m.j_theta, m.j_traj,
                          nm.j_phi, nm.j_theta, nm.j_traj, run.final_gain_norm);
        } else {
            std::snprintf(buf, sizeof buf, ",,,,,,,%.9g\n", run.final_gain_norm);
        }
        out += buf;
    }
    return out;
}

void write_matrix_outputs(const MatrixResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<const RunResult*> runs;
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const auto& norm = result.normalized[i];
        write_run_outputs(result.runs[i], dir / result.runs[i].name, norm ? &*norm : nullptr);
        runs.push_back(&result.runs[i]);
    }
    write_text(dir / "comparison.csv", comparison_table(result));
    write_text(dir / "trajectory.svg", plot::render_svg({trajectory_panel(runs)}, 720.0, 640.0));
    write_text(dir / "gains.svg", plot::render_svg(gain_panels(runs)));
}

}  // namespace afw::scenario
