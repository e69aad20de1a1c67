/**
 * @file autopilot.hpp
 * @brief Cascaded fixed-wing autopilot with additive RCAC augmentation.
 *
 * Cascade: position (energy-based longitudinal + pursuit lateral) ->
 * attitude P loops -> body-rate FF+PI loop -> diagonal allocation.
 * The adaptive set adds one RCAC output to each attitude loop and one per
 * body axis to the rate loop.  Adaptive outputs are emitted one tick ahead:
 * the value added at tick k is the control RCAC produced at tick k-1.
 */
#pragma once

#include "afw/mission.hpp"
#include "afw/rcac.hpp"
#include "afw/signals.hpp"

#include <array>
#include <string_view>

namespace afw::autopilot {

/// The 11 fixed gains plus the trim airspeeds used by the rate-loop scaling.
struct AutopilotGains {
    static constexpr int kGainCount = 11;

    double k_theta = 0.0;
    double k_phi = 0.0;
    Vec3 k_ff = Vec3::Zero();
    Vec3 k_p = Vec3::Zero();
    Vec3 k_i = Vec3::Zero();
    double v_trim_true = 1.0;
    double v_trim_indicated = 1.0;

    void validate() const;
    std::array<double, kGainCount> scalars() const;
};

/// Multiplies all 11 gains by alpha_d; trim airspeeds are untouched.
AutopilotGains detune_gains(const AutopilotGains& gains, double alpha_d);

struct AttitudeSetpoint {
    double roll_s = 0.0;
    double pitch_s = 0.0;
    double thrust_s = 0.0;
};

enum class AdaptiveMode {
    off,
    on,
    /// RCAC runs but its gains are forced to zero after every update.
    pinned_zero,
};

std::string_view to_string(AdaptiveMode m) noexcept;
AdaptiveMode parse_adaptive_mode(std::string_view s);

struct AdaptiveConfig {
    rcac::Hyperparams pitch;
    rcac::Hyperparams roll;
    std::array<rcac::Hyperparams, 3> rate;
    AdaptiveMode mode = AdaptiveMode::off;
};

/// The five adaptive loops: pitch attitude, roll attitude, and p/q/r rates.
class AdaptiveSet {
public:
    AdaptiveSet() = default;
    explicit AdaptiveSet(const AdaptiveConfig& config);

    AdaptiveMode mode() const noexcept { return mode_; }
    bool enabled() const noexcept { return mode_ != AdaptiveMode::off; }

    /// Contribution added this tick (zero when disabled).
    double pitch_output() const noexcept { return enabled() ? pitch_.pending_control() : 0.0; }
    double roll_output() const noexcept { return enabled() ? roll_.pending_control() : 0.0; }
    Vec3 rate_output() const noexcept;

    /// Feed this tick's errors; the resulting controls apply next tick.
    void update_attitude(double pitch_error, double roll_error);
    void update_rate(const Vec3& rate_error);

    const rcac::Loop& pitch() const noexcept { return pitch_; }
    const rcac::Loop& roll() const noexcept { return roll_; }
    const rcac::Loop& rate(int axis) const { return rate_.at(static_cast<std::size_t>(axis)); }

    /// Sum of the 2-norms of all five gain vectors.
    double total_gain_norm() const;

private:
    void pin(rcac::Loop& loop);

    AdaptiveMode mode_ = AdaptiveMode::off;
    rcac::Loop pitch_;
    rcac::Loop roll_;
    std::array<rcac::Loop, 3> rate_;
};

struct AttitudeRates {
    double pitch_rate_s = 0.0;
    double roll_rate_s = 0.0;
};

/// Attitude P laws plus the adaptive attitude contributions; advances the
/// attitude RCAC loops with z = setpoint - measurement.
AttitudeRates attitude_outer_loop(const AttitudeSetpoint& sp, const RateMeasurements& meas,
                                  const AutopilotGains& gains, AdaptiveSet& adaptive);

/// Yaw-rate setpoint for a coordinated turn.  Throws InputError for
/// v_true <= 0 or |roll_s| >= pi/2.
double coordinated_turn_rate(double roll_s, double pitch_s, double v_true);

enum class KinematicsConvention {
    /// Standard 3-2-1 map; (1,3) entry is -sin(pitch).
    standard,
    /// The literal matrix with +sin(pitch) in the (1,3) entry.
    literal_plus_sin,
};

/// Matrix taking [roll rate, pitch rate, yaw rate] to body rates.
Eigen::Matrix3d euler_rate_map(double pitch, double roll,
                               KinematicsConvention conv = KinematicsConvention::standard);

Vec3 euler_rates_to_body(double pitch_m, double roll_m, const Vec3& euler_rates,
                         KinematicsConvention conv = KinematicsConvention::standard);

struct RateLoopConfig {
    double sample_time = 0.004;
    /// Symmetric bound on each component of the error integral; 0 = none.
    double integral_limit = 0.0;
    /// Floor on the airspeed used for the scaling factors.
    double min_scaling_airspeed = 0.0;
};

struct RateLoopState {
    Vec3 integral = Vec3::Zero();
    Vec3 error_prev = Vec3::Zero();
};

/// Feedforward + PI body-rate law with airspeed scaling plus the adaptive
/// rate contributions; advances the rate RCAC loops with z = omega_s - omega_m.
Vec3 rate_loop(const Vec3& omega_s, const RateMeasurements& meas, const AutopilotGains& gains,
               const RateLoopConfig& config, RateLoopState& state, AdaptiveSet& adaptive);

struct Allocation {
    double aileron = 0.0;
    double elevator = 0.0;
    double rudder = 0.0;
    double surface_limit = 0.5235987755982988;
};

/// Diagonal map from angular-acceleration setpoint to deflections, saturated.
SurfaceCommand allocate_controls(const Vec3& alpha_s, double thrust_s, const Allocation& alloc);

struct PositionControllerConfig {
    double sample_time = 0.02;
    double l1_distance = 50.0;
    double roll_limit = 0.7853981633974483;   // 45 deg
    double pitch_limit = 0.5235987755982988;  // 30 deg
    double pitch_trim = 0.0;
    double thrust_trim = 0.5;
    /// Total-energy error (m) to demanded energy rate (m/s).
    double energy_rate_gain = 0.5;
    double energy_rate_limit = 5.0;
    /// Thrust PI on energy-rate error, per (m/s) and per m.
    double thrust_p = 0.1;
    double thrust_i = 0.05;
    double thrust_integral_limit = 0.3;
    /// Pitch from energy balance error (rad/m) and balance rate (rad per m/s).
    double pitch_balance_p = 0.02;
    double pitch_balance_d = 0.04;
};

struct PositionControllerState {
    double thrust_integral = 0.0;
    double v_true_prev = 0.0;
    bool initialized = false;
};

struct LateralGuidance {
    double lateral_accel = 0.0;
    double eta = 0.0;
    Vec2 reference_point = Vec2::Zero();
};

/// Pursuit of a point L1 ahead on the (infinite) leg line.
LateralGuidance pursuit_guidance(const Vec2& position, const Vec2& v_ground,
                                 const mission::PathSegment& path, double l1_distance);

/// Energy-based longitudinal law and pursuit lateral law; outputs clipped.
AttitudeSetpoint position_controller(const Vec3& r_s, double airspeed_s, const NavMeasurements& nav,
                                     const mission::PathSegment& path,
                                     const PositionControllerConfig& config,
                                     PositionControllerState& state);

}  // namespace afw::autopilot
