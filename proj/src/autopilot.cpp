/**
 * @file autopilot.cpp
 * @brief Position, attitude and rate laws of the fixed-wing cascade.
 */
#include "afw/autopilot.hpp"

#include "afw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace afw::autopilot {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw InputError(std::string(what) + " must be finite");
}

}  // namespace

void AutopilotGains::validate() const {
    for (double g : scalars()) {
        if (!std::isfinite(g)) throw InputError("autopilot: gains must be finite");
    }
    if (!(v_trim_true > 0.0) || !(v_trim_indicated > 0.0)) {
        throw InputError("autopilot: trim airspeeds must be positive");
    }
}

std::array<double, AutopilotGains::kGainCount> AutopilotGains::scalars() const {
    return {k_theta, k_phi, k_ff(0), k_ff(1), k_ff(2), k_p(0), k_p(1), k_p(2), k_i(0), k_i(1), k_i(2)};
}

AutopilotGains detune_gains(const AutopilotGains& gains, double alpha_d) {
    if (!(alpha_d >= 0.0) || !std::isfinite(alpha_d)) {
        throw InputError("detune_gains: alpha_d must be a finite value >= 0");
    }
    AutopilotGains out = gains;
    out.k_theta *= alpha_d;
    out.k_phi *= alpha_d;
    out.k_ff *= alpha_d;
    out.k_p *= alpha_d;
    out.k_i *= alpha_d;
    return out;
}

std::string_view to_string(AdaptiveMode m) noexcept {
    switch (m) {
        case AdaptiveMode::off: return "off";
        case AdaptiveMode::on: return "on";
        case AdaptiveMode::pinned_zero: return "pinned_zero";
    }
    return "?";
}

AdaptiveMode parse_adaptive_mode(std::string_view s) {
    if (s == "off" || s == "false") return AdaptiveMode::off;
    if (s == "on" || s == "true") return AdaptiveMode::on;
    if (s == "pinned_zero") return AdaptiveMode::pinned_zero;
    throw InputError("unknown adaptive mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Adaptive set
// ---------------------------------------------------------------------------

AdaptiveSet::AdaptiveSet(const AdaptiveConfig& config)
    : mode_(config.mode),
      pitch_(config.pitch),
      roll_(config.roll),
      rate_{rcac::Loop(config.rate[0]), rcac::Loop(config.rate[1]), rcac::Loop(config.rate[2])} {
    if (mode_ == AdaptiveMode::pinned_zero) {
        pin(pitch_);
        pin(roll_);
        for (auto& l : rate_) pin(l);
    }
}

Vec3 AdaptiveSet::rate_output() const noexcept {
    if (!enabled()) return Vec3::Zero();
    return Vec3(rate_[0].pending_control(), rate_[1].pending_control(), rate_[2].pending_control());
}

void AdaptiveSet::pin(rcac::Loop& loop) {
    loop.force_theta(rcac::Vector::Zero(loop.state().theta.size()));
}

void AdaptiveSet::update_attitude(double pitch_error, double roll_error) {
    if (!enabled()) return;
    pitch_.update(pitch_error);
    roll_.update(roll_error);
    if (mode_ == AdaptiveMode::pinned_zero) {
        pin(pitch_);
        pin(roll_);
    }
}

void AdaptiveSet::update_rate(const Vec3& rate_error) {
    if (!enabled()) return;
    for (int i = 0; i < 3; ++i) {
        auto& loop = rate_[static_cast<std::size_t>(i)];
        loop.update(rate_error(i));
        if (mode_ == AdaptiveMode::pinned_zero) pin(loop);
    }
}

double AdaptiveSet::total_gain_norm() const {
    double sum = pitch_.state().theta.norm() + roll_.state().theta.norm();
    for (const auto& l : rate_) sum += l.state().theta.norm();
    return sum;
}

// ---------------------------------------------------------------------------
// Attitude and rate loops
// ---------------------------------------------------------------------------

AttitudeRates attitude_outer_loop(const AttitudeSetpoint& sp, const RateMeasurements& meas,
                                  const AutopilotGains& gains, AdaptiveSet& adaptive) {
    require_finite(sp.roll_s, "roll setpoint");
    require_finite(sp.pitch_s, "pitch setpoint");
    const double pitch_error = sp.pitch_s - meas.pitch_m;
    const double roll_error = sp.roll_s - meas.roll_m;

    AttitudeRates out;
    out.pitch_rate_s = gains.k_theta * pitch_error + adaptive.pitch_output();
    out.roll_rate_s = gains.k_phi * roll_error + adaptive.roll_output();
    adaptive.update_attitude(pitch_error, roll_error);
    return out;
}

double coordinated_turn_rate(double roll_s, double pitch_s, double v_true) {
    if (!(v_true > 0.0)) throw InputError("coordinated_turn_rate: v_true must be positive");
    if (!(std::abs(roll_s) < 0.5 * std::numbers::pi)) {
        throw InputError("coordinated_turn_rate: |roll| must be below 90 deg");
    }
    return kGravity * std::tan(roll_s) * std::cos(pitch_s) / v_true;
}

Eigen::Matrix3d euler_rate_map(double pitch, double roll, KinematicsConvention conv) {
    const double sp = std::sin(pitch), cp = std::cos(pitch);
    const double sr = std::sin(roll), cr = std::cos(roll);
    const double s13 = conv == KinematicsConvention::standard ? -sp : sp;
    Eigen::Matrix3d s;
    s << 1.0, 0.0, s13,
         0.0, cr, sr * cp,
         0.0, -sr, cr * cp;
    return s;
}

Vec3 euler_rates_to_body(double pitch_m, double roll_m, const Vec3& euler_rates,
                         KinematicsConvention conv) {
    return euler_rate_map(pitch_m, roll_m, conv) * euler_rates;
}

Vec3 rate_loop(const Vec3& omega_s, const RateMeasurements& meas, const AutopilotGains& gains,
               const RateLoopConfig& config, RateLoopState& state, AdaptiveSet& adaptive) {
    if (!(meas.v_true > 0.0) || !(meas.v_indicated > 0.0)) {
        throw InputError("rate_loop: airspeeds must be positive");
    }
    if (!omega_s.allFinite()) throw InputError("rate_loop: rate setpoint must be finite");

    const double v_true = std::max(meas.v_true, config.min_scaling_airspeed);
    const double v_ind = std::max(meas.v_indicated, config.min_scaling_airspeed);
    const double ff_scale = gains.v_trim_true / v_true;
    const double pi_scale = std::pow(gains.v_trim_indicated / v_ind, 2);

    const Vec3 error = omega_s - meas.omega_m;
    state.integral += config.sample_time * state.error_prev;
    if (config.integral_limit > 0.0) {
        state.integral = state.integral.cwiseMax(-config.integral_limit).cwiseMin(config.integral_limit);
    }
    state.error_prev = error;

    const Vec3 alpha_s = ff_scale * gains.k_ff.cwiseProduct(omega_s) +
                         pi_scale * (gains.k_p.cwiseProduct(error) + gains.k_i.cwiseProduct(state.integral)) +
                         adaptive.rate_output();
    adaptive.update_rate(error);
    return alpha_s;
}

SurfaceCommand allocate_controls(const Vec3& alpha_s, double thrust_s, const Allocation& alloc) {
    const double lim = alloc.surface_limit;
    SurfaceCommand cmd;
    cmd.aileron = std::clamp(alloc.aileron * alpha_s(0), -lim, lim);
    cmd.elevator = std::clamp(alloc.elevator * alpha_s(1), -lim, lim);
    cmd.rudder = std::clamp(alloc.rudder * alpha_s(2), -lim, lim);
    cmd.throttle = std::clamp(thrust_s, 0.0, 1.0);
    return cmd;
}

// ---------------------------------------------------------------------------
// Position controller
// ---------------------------------------------------------------------------

LateralGuidance pursuit_guidance(const Vec2& position, const Vec2& v_ground,
                                 const mission::PathSegment& path, double l1_distance) {
    const Vec2 a = path.start.head<2>();
    const Vec2 b = path.end.head<2>();
    const double length = (b - a).norm();
    if (!(length > 0.0)) throw InputError("pursuit_guidance: degenerate path segment");
    if (!(l1_distance > 0.0)) throw InputError("pursuit_guidance: L1 distance must be positive");

    const Vec2 dir = (b - a) / length;
    const double along = (position - a).dot(dir);
    const Vec2 foot = a + along * dir;
    const double cross = (position - foot).norm();

    LateralGuidance out;
    out.reference_point = cross < l1_distance
                              ? Vec2(foot + std::sqrt(l1_distance * l1_distance - cross * cross) * dir)
                              : foot;

    const double speed = v_ground.norm();
    const Vec2 los = out.reference_point - position;
    if (speed < 1e-6 || los.norm() < 1e-9) return out;

    // Positive eta means the reference point lies to the right of the track.
    const double cross_z = v_ground(0) * los(1) - v_ground(1) * los(0);
    out.eta = std::atan2(cross_z, v_ground.dot(los));
    const double eta = std::clamp(out.eta, -0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
    out.lateral_accel = 2.0 * speed * speed * std::sin(eta) / l1_distance;
    return out;
}

AttitudeSetpoint position_controller(const Vec3& r_s, double airspeed_s, const NavMeasurements& nav,
                                     const mission::PathSegment& path,
                                     const PositionControllerConfig& config,
                                     PositionControllerState& state) {
    if (!(nav.v_true > 0.0)) throw InputError("position_controller: v_true must be positive");
    if (!(airspeed_s > 0.0)) throw InputError("position_controller: airspeed setpoint must be positive");

    // Longitudinal: specific energies expressed as equivalent heights.
    const double height_error = nav.r_m(2) - r_s(2);  // down axis: positive when below setpoint
    const double speed_term = (airspeed_s * airspeed_s - nav.v_true * nav.v_true) / (2.0 * kGravity);
    const double energy_error = height_error + speed_term;
    const double balance_error = height_error - speed_term;

    const double v_dot = state.initialized ? (nav.v_true - state.v_true_prev) / config.sample_time : 0.0;
    state.v_true_prev = nav.v_true;
    state.initialized = true;
    const double kinetic_rate = nav.v_true * v_dot / kGravity;
    const double energy_rate = nav.climb_rate + kinetic_rate;
    const double balance_rate = nav.climb_rate - kinetic_rate;

    const double energy_rate_demand = std::clamp(config.energy_rate_gain * energy_error,
                                                 -config.energy_rate_limit, config.energy_rate_limit);
    const double energy_rate_error = energy_rate_demand - energy_rate;
    state.thrust_integral = std::clamp(state.thrust_integral + config.thrust_i * energy_rate_error * config.sample_time,
                                       -config.thrust_integral_limit, config.thrust_integral_limit);

    AttitudeSetpoint sp;
    sp.thrust_s = std::clamp(config.thrust_trim + config.thrust_p * energy_rate_error + state.thrust_integral,
                             0.0, 1.0);
    sp.pitch_s = std::clamp(config.pitch_trim + config.pitch_balance_p * balance_error -
                                config.pitch_balance_d * balance_rate,
                            -config.pitch_limit, config.pitch_limit);

    // Lateral.
    const auto guidance = pursuit_guidance(nav.r_m.head<2>(), nav.v_ground, path, config.l1_distance);
    sp.roll_s = std::clamp(std::atan(guidance.lateral_accel / kGravity), -config.roll_limit, config.roll_limit);
    return sp;
}

}  // namespace afw::autopilot
