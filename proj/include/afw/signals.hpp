/**
 * @file signals.hpp
 * @brief Signals exchanged between the simulator and the autopilot cascade.
 */
#pragma once

#include <Eigen/Dense>

namespace afw {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kGravity = 9.80665;

/// Attitude-loop inputs: body rates, airspeeds and the measured roll/pitch.
struct RateMeasurements {
    Vec3 omega_m = Vec3::Zero();
    double v_true = 0.0;
    double v_indicated = 0.0;
    double roll_m = 0.0;
    double pitch_m = 0.0;
};

/// Position-loop inputs.  Positions are north-east-down.
struct NavMeasurements {
    Vec3 r_m = Vec3::Zero();
    Vec2 v_ground = Vec2::Zero();
    double climb_rate = 0.0;
    double v_true = 0.0;
};

struct Measurements {
    RateMeasurements att;
    NavMeasurements nav;
};

/// Allocated actuator commands.  Surfaces in rad, throttle normalized.
/// Positive deflections produce positive body moments.
struct SurfaceCommand {
    double aileron = 0.0;
    double elevator = 0.0;
    double rudder = 0.0;
    double throttle = 0.0;
};

}  // namespace afw
