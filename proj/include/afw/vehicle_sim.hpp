/**
 * @file vehicle_sim.hpp
 * @brief Deterministic rigid-body fixed-wing model with linear aerodynamics,
 *        first-order actuators and stuck-surface fault injection.
 *
 * Frames: positions and inertial velocity are resolved north-east-down, the
 * body frame is x forward, y right wing, z down.  Euler angles follow the
 * 3-2-1 (yaw, pitch, roll) sequence.
 */
#pragma once

#include "afw/signals.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace afw::sim {

struct AircraftState {
    Vec3 r = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    /// roll, pitch, yaw
    Vec3 euler = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
};

/// Nondimensional derivatives; rate derivatives use the usual b/2V, c/2V
/// normalization.  Sign convention: every surface derivative listed as a
/// moment derivative is positive for its primary axis.
struct AeroCoefficients {
    double cl0 = 0.0, cl_alpha = 0.0, cl_q = 0.0, cl_elevator = 0.0;
    double cd0 = 0.0, cd_k = 0.0;
    double cy_beta = 0.0, cy_p = 0.0, cy_r = 0.0, cy_rudder = 0.0;
    double croll_beta = 0.0, croll_p = 0.0, croll_r = 0.0, croll_aileron = 0.0, croll_rudder = 0.0;
    double cm0 = 0.0, cm_alpha = 0.0, cm_q = 0.0, cm_elevator = 0.0;
    double cn_beta = 0.0, cn_p = 0.0, cn_r = 0.0, cn_aileron = 0.0, cn_rudder = 0.0;
};

/// Inverse control effectiveness, rad of deflection per rad/s^2.
struct AllocationConstants {
    double aileron = 0.0;
    double elevator = 0.0;
    double rudder = 0.0;
};

struct AircraftParams {
    std::string name = "unnamed";
    double mass = 1.0;
    Vec3 inertia = Vec3::Ones();
    double wing_area = 1.0;
    double span = 1.0;
    double chord = 1.0;
    double air_density = 1.225;
    AeroCoefficients aero;
    double thrust_max = 0.0;
    double v_trim_true = 1.0;
    double v_trim_indicated = 1.0;
    double surface_limit = 0.5235987755982988;  // 30 deg
    double surface_time_constant = 0.02;
    double throttle_time_constant = 0.1;
    double alpha_limit = 0.3490658503988659;  // 20 deg
    AllocationConstants allocation;

    void validate() const;
};

struct Environment {
    Vec3 wind = Vec3::Zero();
};

enum class Surface { left_aileron, elevator, rudder };

std::string_view to_string(Surface s) noexcept;
Surface parse_surface(std::string_view s);

struct FailureConfig {
    double alpha_d = 1.0;
    std::optional<Surface> stuck_surface;
    double stuck_angle = 0.0;
    double stuck_time = 0.0;

    void validate(double surface_limit) const;
};

struct ActuatorState {
    double left_aileron = 0.0;
    double right_aileron = 0.0;
    double elevator = 0.0;
    double rudder = 0.0;
    double throttle = 0.0;
    SurfaceCommand commanded;
    double surface_time_constant = 0.02;
    double throttle_time_constant = 0.1;
    double surface_limit = 0.5235987755982988;

    static ActuatorState from_params(const AircraftParams& p);

    /// Roll-producing differential deflection (left - right) / 2.
    double effective_aileron() const noexcept { return 0.5 * (left_aileron - right_aileron); }
};

/// First-order lag toward the command, then saturation, then fault override.
/// The single aileron command drives left = +cmd and right = -cmd.
ActuatorState apply_actuators(const SurfaceCommand& cmd, const ActuatorState& act,
                              const FailureConfig& failure, double t, double dt);

/// Body forces and moments plus derived air data for one state.
struct AeroSample {
    Vec3 force_body = Vec3::Zero();
    Vec3 moment_body = Vec3::Zero();
    double airspeed = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

AeroSample evaluate_loads(const AircraftState& state, const ActuatorState& act,
                          const AircraftParams& params, const Environment& env);

/// Time derivative packed as [r', v', euler', omega'].
using StateDerivative = Eigen::Matrix<double, 12, 1>;

StateDerivative derivative(const AircraftState& state, const ActuatorState& act,
                           const AircraftParams& params, const Environment& env);

/// Classical RK4 step with actuators held over the interval.  Throws
/// FaultError on a non-finite derivative or when |pitch| reaches 89 deg.
AircraftState step_dynamics(const AircraftState& state, const ActuatorState& act,
                            const AircraftParams& params, double dt, const Environment& env = {},
                            std::int64_t step_index = 0);

Measurements read_sensors(const AircraftState& state, const Environment& env = {});

/// Direction cosine matrix taking body vectors to north-east-down.
Eigen::Matrix3d body_to_ned(const Vec3& euler);

struct TrimPoint {
    double alpha = 0.0;
    double elevator = 0.0;
    double throttle = 0.0;
    AircraftState state;
    ActuatorState actuators;
};

/// Wings-level, constant-altitude trim at the given airspeed heading north.
/// Newton iteration on axial force, normal force and pitching moment.
TrimPoint find_trim(const AircraftParams& params, double airspeed, double altitude = 100.0);

/// Control effectiveness at trim, rad/s^2 per rad, for roll/pitch/yaw.
Vec3 control_effectiveness(const AircraftParams& params, double airspeed);

}  // namespace afw::sim
