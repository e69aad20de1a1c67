/**
 * @file vehicle_sim.cpp
 * @brief Six-degree-of-freedom fixed-wing dynamics.
 */
#include "afw/vehicle_sim.hpp"

#include "afw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace afw::sim {

namespace {

constexpr double kPitchGuard = 89.0 * std::numbers::pi / 180.0;
constexpr double kMinAirspeed = 1e-6;

double lag(double actual, double command, double dt, double tau) {
    if (tau <= 0.0) return command;
    if (command == actual) return actual;
    return actual + (command - actual) * (1.0 - std::exp(-dt / tau));
}

AircraftState unpack(const StateDerivative& x) {
    AircraftState s;
    s.r = x.segment<3>(0);
    s.v = x.segment<3>(3);
    s.euler = x.segment<3>(6);
    s.omega = x.segment<3>(9);
    return s;
}

StateDerivative pack(const AircraftState& s) {
    StateDerivative x;
    x << s.r, s.v, s.euler, s.omega;
    return x;
}

}  // namespace

void AircraftParams::validate() const {
    if (!(mass > 0.0)) throw InputError("aircraft: mass must be positive");
    if (!(inertia.minCoeff() > 0.0)) throw InputError("aircraft: inertia entries must be positive");
    if (!(wing_area > 0.0) || !(span > 0.0) || !(chord > 0.0)) {
        throw InputError("aircraft: geometry must be positive");
    }
    if (!(air_density > 0.0)) throw InputError("aircraft: air density must be positive");
    if (!(thrust_max >= 0.0)) throw InputError("aircraft: thrust_max must be nonnegative");
    if (!(v_trim_true > 0.0) || !(v_trim_indicated > 0.0)) {
        throw InputError("aircraft: trim airspeeds must be positive");
    }
    if (!(surface_limit > 0.0)) throw InputError("aircraft: surface_limit must be positive");
    if (!(surface_time_constant >= 0.0) || !(throttle_time_constant >= 0.0)) {
        throw InputError("aircraft: actuator time constants must be nonnegative");
    }
    if (!(alpha_limit > 0.0)) throw InputError("aircraft: alpha_limit must be positive");
}

std::string_view to_string(Surface s) noexcept {
    switch (s) {
        case Surface::left_aileron: return "left_aileron";
        case Surface::elevator: return "elevator";
        case Surface::rudder: return "rudder";
    }
    return "?";
}

Surface parse_surface(std::string_view s) {
    if (s == "left_aileron") return Surface::left_aileron;
    if (s == "elevator") return Surface::elevator;
    if (s == "rudder") return Surface::rudder;
    throw InputError("unknown surface '" + std::string(s) + "'");
}

void FailureConfig::validate(double surface_limit) const {
    if (!(alpha_d >= 0.0) || !std::isfinite(alpha_d)) throw InputError("failure: alpha_d must be >= 0");
    if (stuck_surface) {
        if (!(std::abs(stuck_angle) <= surface_limit)) {
            throw InputError("failure: stuck_angle exceeds the surface limit");
        }
        if (!(stuck_time >= 0.0)) throw InputError("failure: stuck_time must be >= 0");
    }
}

ActuatorState ActuatorState::from_params(const AircraftParams& p) {
    ActuatorState a;
    a.surface_time_constant = p.surface_time_constant;
    a.throttle_time_constant = p.throttle_time_constant;
    a.surface_limit = p.surface_limit;
    return a;
}

ActuatorState apply_actuators(const SurfaceCommand& cmd, const ActuatorState& act,
                              const FailureConfig& failure, double t, double dt) {
    ActuatorState next = act;
    next.commanded = cmd;
    const double lim = act.surface_limit;
    const double tau = act.surface_time_constant;
    next.left_aileron = std::clamp(lag(act.left_aileron, cmd.aileron, dt, tau), -lim, lim);
    next.right_aileron = std::clamp(lag(act.right_aileron, -cmd.aileron, dt, tau), -lim, lim);
    next.elevator = std::clamp(lag(act.elevator, cmd.elevator, dt, tau), -lim, lim);
    next.rudder = std::clamp(lag(act.rudder, cmd.rudder, dt, tau), -lim, lim);
    next.throttle = std::clamp(lag(act.throttle, cmd.throttle, dt, act.throttle_time_constant), 0.0, 1.0);

    if (failure.stuck_surface && t >= failure.stuck_time) {
        switch (*failure.stuck_surface) {
            case Surface::left_aileron: next.left_aileron = failure.stuck_angle; break;
            case Surface::elevator: next.elevator = failure.stuck_angle; break;
            case Surface::rudder: next.rudder = failure.stuck_angle; break;
        }
    }
    return next;
}

Eigen::Matrix3d body_to_ned(const Vec3& euler) {
    const double cr = std::cos(euler(0)), sr = std::sin(euler(0));
    const double cp = std::cos(euler(1)), sp = std::sin(euler(1));
    const double cy = std::cos(euler(2)), sy = std::sin(euler(2));
    Eigen::Matrix3d m;
    m << cp * cy, sr * sp * cy - cr * sy, cr * sp * cy + sr * sy,
         cp * sy, sr * sp * sy + cr * cy, cr * sp * sy - sr * cy,
         -sp, sr * cp, cr * cp;
    return m;
}

AeroSample evaluate_loads(const AircraftState& state, const ActuatorState& act,
                          const AircraftParams& params, const Environment& env) {
    AeroSample out;
    const Eigen::Matrix3d dcm = body_to_ned(state.euler);
    const Vec3 v_air_body = dcm.transpose() * (state.v - env.wind);
    const double airspeed = v_air_body.norm();
    out.airspeed = airspeed;

    const double thrust = params.thrust_max * act.throttle;
    out.force_body = Vec3(thrust, 0.0, 0.0);
    if (airspeed < kMinAirspeed) return out;

    const double alpha = std::atan2(v_air_body(2), v_air_body(0));
    const double beta = std::asin(std::clamp(v_air_body(1) / airspeed, -1.0, 1.0));
    out.alpha = alpha;
    out.beta = beta;
    const double a = std::clamp(alpha, -params.alpha_limit, params.alpha_limit);

    const auto& c = params.aero;
    const double p_hat = state.omega(0) * params.span / (2.0 * airspeed);
    const double q_hat = state.omega(1) * params.chord / (2.0 * airspeed);
    const double r_hat = state.omega(2) * params.span / (2.0 * airspeed);
    const double da = act.effective_aileron();
    const double de = act.elevator;
    const double dr = act.rudder;

    const double cl = c.cl0 + c.cl_alpha * a + c.cl_q * q_hat + c.cl_elevator * de;
    const double cd = c.cd0 + c.cd_k * cl * cl;
    const double cy = c.cy_beta * beta + c.cy_p * p_hat + c.cy_r * r_hat + c.cy_rudder * dr;
    const double croll = c.croll_beta * beta + c.croll_p * p_hat + c.croll_r * r_hat +
                         c.croll_aileron * da + c.croll_rudder * dr;
    const double cm = c.cm0 + c.cm_alpha * a + c.cm_q * q_hat + c.cm_elevator * de;
    const double cn = c.cn_beta * beta + c.cn_p * p_hat + c.cn_r * r_hat + c.cn_aileron * da +
                      c.cn_rudder * dr;

    const double qbar_s = 0.5 * params.air_density * airspeed * airspeed * params.wing_area;
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    out.force_body += qbar_s * Vec3(-cd * ca + cl * sa, cy, -cd * sa - cl * ca);
    out.moment_body = qbar_s * Vec3(params.span * croll, params.chord * cm, params.span * cn);
    return out;
}

StateDerivative derivative(const AircraftState& s, const ActuatorState& act,
                           const AircraftParams& params, const Environment& env) {
    const AeroSample loads = evaluate_loads(s, act, params, env);
    const Eigen::Matrix3d dcm = body_to_ned(s.euler);

    const Vec3 accel = Vec3(0.0, 0.0, kGravity) + dcm * loads.force_body / params.mass;

    const double sr = std::sin(s.euler(0)), cr = std::cos(s.euler(0));
    const double cp = std::cos(s.euler(1)), tp = std::tan(s.euler(1));
    const double p = s.omega(0), q = s.omega(1), r = s.omega(2);
    const Vec3 euler_rate(p + (q * sr + r * cr) * tp, q * cr - r * sr, (q * sr + r * cr) / cp);

    const Vec3& j = params.inertia;
    const Vec3 omega_dot((loads.moment_body(0) - (j(2) - j(1)) * q * r) / j(0),
                         (loads.moment_body(1) - (j(0) - j(2)) * p * r) / j(1),
                         (loads.moment_body(2) - (j(1) - j(0)) * p * q) / j(2));

    StateDerivative d;
    d << s.v, accel, euler_rate, omega_dot;
    return d;
}

AircraftState step_dynamics(const AircraftState& state, const ActuatorState& act,
                            const AircraftParams& params, double dt, const Environment& env,
                            std::int64_t step_index) {
    if (!(dt > 0.0) || dt > 0.02) throw InputError("step_dynamics: dt must lie in (0, 0.02]");

    const StateDerivative x0 = pack(state);
    auto f = [&](const StateDerivative& x) {
        StateDerivative d = derivative(unpack(x), act, params, env);
        if (!d.allFinite()) throw FaultError("step_dynamics: non-finite state derivative", step_index);
        return d;
    };
    const StateDerivative k1 = f(x0);
    const StateDerivative k2 = f(x0 + 0.5 * dt * k1);
    const StateDerivative k3 = f(x0 + 0.5 * dt * k2);
    const StateDerivative k4 = f(x0 + dt * k3);
    AircraftState next = unpack(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

    if (!(std::abs(next.euler(1)) < kPitchGuard)) {
        throw FaultError("step_dynamics: pitch attitude reached the 89 deg Euler guard", step_index);
    }
    next.euler(2) = std::remainder(next.euler(2), 2.0 * std::numbers::pi);
    return next;
}

Measurements read_sensors(const AircraftState& state, const Environment& env) {
    Measurements m;
    const double v_true = (state.v - env.wind).norm();
    m.att.omega_m = state.omega;
    m.att.v_true = v_true;
    m.att.v_indicated = v_true;
    m.att.roll_m = state.euler(0);
    m.att.pitch_m = state.euler(1);
    m.nav.r_m = state.r;
    m.nav.v_ground = state.v.head<2>();
    m.nav.climb_rate = -state.v(2);
    m.nav.v_true = v_true;
    return m;
}

TrimPoint find_trim(const AircraftParams& params, double airspeed, double altitude) {
    params.validate();
    if (!(airspeed > 0.0)) throw InputError("find_trim: airspeed must be positive");

    auto build = [&](const Vec3& x) {
        TrimPoint t;
        t.alpha = x(0);
        t.elevator = x(1);
        t.throttle = x(2);
        t.state.r = Vec3(0.0, 0.0, -altitude);
        t.state.v = Vec3(airspeed, 0.0, 0.0);
        t.state.euler = Vec3(0.0, x(0), 0.0);
        t.actuators = ActuatorState::from_params(params);
        t.actuators.elevator = x(1);
        t.actuators.throttle = x(2);
        t.actuators.commanded.elevator = x(1);
        t.actuators.commanded.throttle = x(2);
        return t;
    };
    auto residual = [&](const Vec3& x) {
        const TrimPoint t = build(x);
        const AeroSample loads = evaluate_loads(t.state, t.actuators, params, {});
        const double w = params.mass * kGravity;
        return Vec3((loads.force_body(0) - w * std::sin(x(0))) / w,
                    (loads.force_body(2) + w * std::cos(x(0))) / w,
                    loads.moment_body(1) / (params.inertia(1)));
    };

    Vec3 x(0.05, 0.0, 0.5);
    for (int iter = 0; iter < 50; ++iter) {
        const Vec3 r = residual(x);
        if (r.lpNorm<Eigen::Infinity>() < 1e-13) break;
        Eigen::Matrix3d jac;
        for (int i = 0; i < 3; ++i) {
            Vec3 h = Vec3::Zero();
            h(i) = 1e-7;
            jac.col(i) = (residual(x + h) - residual(x - h)) / 2e-7;
        }
        x -= jac.fullPivLu().solve(r);
    }
    if (residual(x).lpNorm<Eigen::Infinity>() > 1e-9) {
        throw InputError("find_trim: Newton iteration did not converge");
    }
    if (x(2) < 0.0 || x(2) > 1.0 || std::abs(x(1)) > params.surface_limit ||
        std::abs(x(0)) > params.alpha_limit) {
        throw InputError("find_trim: no trim inside the actuator and alpha limits");
    }
    return build(x);
}

Vec3 control_effectiveness(const AircraftParams& params, double airspeed) {
    const double qbar_s = 0.5 * params.air_density * airspeed * airspeed * params.wing_area;
    const auto& c = params.aero;
    return Vec3(qbar_s * params.span * c.croll_aileron / params.inertia(0),
                qbar_s * params.chord * c.cm_elevator / params.inertia(1),
                qbar_s * params.span * c.cn_rudder / params.inertia(2));
}

}  // namespace afw::sim
