#include "afw/errors.hpp"
#include "afw/vehicle_sim.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace afw;
using namespace afw::sim;

namespace {

ActuatorState fresh_actuators(double tau = 0.02) {
    ActuatorState a;
    a.surface_time_constant = tau;
    a.throttle_time_constant = 0.1;
    return a;
}

double energy(const AircraftState& s, double mass) {
    return 0.5 * mass * s.v.squaredNorm() - mass * kGravity * s.r(2);
}

AircraftState integrate(AircraftState s, const ActuatorState& act, const AircraftParams& p, double dt,
                        double horizon) {
    const int n = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < n; ++i) s = step_dynamics(s, act, p, dt);
    return s;
}

}  // namespace

TEST_CASE("actuator lag fixed point") {
    auto act = fresh_actuators();
    act.left_aileron = 0.1;
    act.right_aileron = -0.1;
    act.elevator = -0.05;
    act.rudder = 0.02;
    act.throttle = 0.4;
    const SurfaceCommand cmd{0.1, -0.05, 0.02, 0.4};
    const auto next = apply_actuators(cmd, act, {}, 0.0, 0.004);
    CHECK(next.left_aileron == 0.1);
    CHECK(next.right_aileron == -0.1);
    CHECK(next.elevator == -0.05);
    CHECK(next.rudder == 0.02);
    CHECK(next.throttle == 0.4);
}

TEST_CASE("first-order lag uses the exact discretization") {
    const auto next = apply_actuators({0.0, 1.0, 0.0, 0.0}, fresh_actuators(0.02), {}, 0.0, 0.004);
    CHECK(next.elevator == doctest::Approx(1.0 - std::exp(-0.2)).epsilon(1e-14));
    CHECK(next.elevator == doctest::Approx(0.1813).epsilon(1e-3));
}

TEST_CASE("aileron mixing and saturation") {
    auto act = fresh_actuators(0.0);
    act.throttle_time_constant = 0.0;
    act.surface_limit = 0.5;
    const auto next = apply_actuators({2.0, -3.0, 0.7, 1.5}, act, {}, 0.0, 0.004);
    CHECK(next.left_aileron == 0.5);
    CHECK(next.right_aileron == -0.5);
    CHECK(next.elevator == -0.5);
    CHECK(next.rudder == 0.5);
    CHECK(next.throttle == 1.0);
    CHECK(next.effective_aileron() == 0.5);
}

TEST_CASE("stuck left aileron holds its angle exactly") {
    FailureConfig f;
    f.stuck_surface = Surface::left_aileron;
    f.stuck_angle = 0.1;
    f.stuck_time = 1.0;
    auto act = fresh_actuators();

    SUBCASE("inactive before the activation time") {
        const auto next = apply_actuators({0.3, 0, 0, 0}, act, f, 0.996, 0.004);
        CHECK(next.left_aileron != 0.1);
    }
    SUBCASE("frozen regardless of command, right aileron still operative") {
        double right_prev = act.right_aileron;
        for (int k = 0; k < 500; ++k) {
            const double cmd = 0.3 * std::sin(0.05 * k);
            act = apply_actuators({cmd, 0, 0, 0}, act, f, 1.0 + 0.004 * k, 0.004);
            REQUIRE(act.left_aileron == 0.1);
            if (k > 0) CHECK(act.right_aileron != right_prev);
            right_prev = act.right_aileron;
        }
    }
}

TEST_CASE("failure config validation") {
    FailureConfig f;
    f.stuck_surface = Surface::rudder;
    f.stuck_angle = 0.6;
    CHECK_THROWS_AS(f.validate(0.5), InputError);
    f.stuck_angle = 0.1;
    f.stuck_time = -1.0;
    CHECK_THROWS_AS(f.validate(0.5), InputError);
    f.stuck_time = 0.0;
    CHECK_NOTHROW(f.validate(0.5));
    f.alpha_d = -0.1;
    CHECK_THROWS_AS(f.validate(0.5), InputError);
    CHECK(parse_surface("left_aileron") == Surface::left_aileron);
    CHECK_THROWS_AS(parse_surface("flap"), InputError);
}

TEST_CASE("sensor mapping") {
    AircraftState s;
    SUBCASE("no wind") {
        s.v = Vec3(20, 0, 0);
        const auto m = read_sensors(s);
        CHECK(m.att.v_true == 20.0);
        CHECK(m.att.v_indicated == 20.0);
        CHECK(m.nav.v_ground == Vec2(20, 0));
    }
    SUBCASE("norm") {
        s.v = Vec3(3, 4, 0);
        CHECK(read_sensors(s).att.v_true == 5.0);
    }
    SUBCASE("steady wind is subtracted from airspeed only") {
        s.v = Vec3(20, 0, 0);
        const auto m = read_sensors(s, Environment{Vec3(5, 0, 0)});
        CHECK(m.att.v_true == 15.0);
        CHECK(m.nav.v_ground == Vec2(20, 0));
    }
    SUBCASE("attitude, rates and position pass through") {
        s.r = Vec3(1, 2, -3);
        s.v = Vec3(10, 0, -2);
        s.euler = Vec3(0.1, -0.2, 0.3);
        s.omega = Vec3(0.4, 0.5, 0.6);
        const auto m = read_sensors(s);
        CHECK(m.nav.r_m == s.r);
        CHECK(m.nav.climb_rate == 2.0);
        CHECK(m.att.roll_m == 0.1);
        CHECK(m.att.pitch_m == -0.2);
        CHECK(m.att.omega_m == s.omega);
    }
}

TEST_CASE("gravity-only free fall") {
    AircraftParams p = test::small_uav();
    p.aero = {};
    p.thrust_max = 0.0;
    AircraftState s;
    s.v = Vec3(5, 0, 0);
    s.omega = Vec3(0.1, 0, 0);
    const auto d = derivative(s, fresh_actuators(), p, {});
    CHECK(d.segment<3>(3) == Vec3(0, 0, kGravity));
    CHECK(d.segment<3>(9) == Vec3::Zero());
    const auto s1 = step_dynamics(s, fresh_actuators(), p, 0.01);
    CHECK(s1.omega == s.omega);
    CHECK(s1.v(2) == doctest::Approx(kGravity * 0.01).epsilon(1e-12));
}

TEST_CASE("trim point is an equilibrium") {
    const auto& p = test::small_uav();
    const auto trim = find_trim(p, p.v_trim_true);
    CHECK(trim.throttle > 0.0);
    CHECK(trim.throttle < 1.0);
    CHECK(std::abs(trim.elevator) < p.surface_limit);

    const double dt = 0.004;
    const auto next = step_dynamics(trim.state, trim.actuators, p, dt);
    CHECK((next.v - trim.state.v).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((next.euler - trim.state.euler).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((next.omega - trim.state.omega).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((next.r - trim.state.r - dt * trim.state.v).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("allocation constants invert the control effectiveness at trim") {
    const auto& p = test::small_uav();
    const Vec3 eff = control_effectiveness(p, p.v_trim_true);
    CHECK(p.allocation.aileron * eff(0) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p.allocation.elevator * eff(1) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(p.allocation.rudder * eff(2) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("energy is conserved without thrust and drag") {
    AircraftParams p = test::small_uav();
    p.aero.cd0 = 0.0;
    p.aero.cd_k = 0.0;
    p.thrust_max = 0.0;
    const auto trim = find_trim(test::small_uav(), 18.0);
    const AircraftState s0 = trim.state;
    const auto s1 = integrate(s0, trim.actuators, p, 0.004, 1.0);
    const double e0 = energy(s0, p.mass);
    CHECK(std::abs(energy(s1, p.mass) - e0) / e0 < 1e-4);
}

TEST_CASE("integrator converges at fourth order") {
    const auto& p = test::small_uav();
    auto trim = find_trim(p, 18.0);
    trim.actuators.left_aileron = 0.05;
    trim.actuators.right_aileron = -0.05;
    trim.actuators.elevator += 0.02;
    trim.actuators.rudder = 0.01;
    const double horizon = 0.4;
    const auto ref = integrate(trim.state, trim.actuators, p, 0.0002, horizon);
    auto err = [&](double dt) {
        const auto s = integrate(trim.state, trim.actuators, p, dt, horizon);
        StateDerivative d;
        d << s.r - ref.r, s.v - ref.v, s.euler - ref.euler, s.omega - ref.omega;
        return d.norm();
    };
    const double ratio = err(0.02) / err(0.01);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("dynamics are deterministic") {
    const auto& p = test::small_uav();
    const auto trim = find_trim(p, 18.0);
    auto act = trim.actuators;
    act.rudder = 0.05;
    const auto a = integrate(trim.state, act, p, 0.004, 2.0);
    const auto b = integrate(trim.state, act, p, 0.004, 2.0);
    CHECK(a.r == b.r);
    CHECK(a.v == b.v);
    CHECK(a.euler == b.euler);
    CHECK(a.omega == b.omega);
}

TEST_CASE("pitch guard and step validation") {
    const auto& p = test::small_uav();
    const auto trim = find_trim(p, 18.0);
    CHECK_THROWS_AS(step_dynamics(trim.state, trim.actuators, p, 0.0), InputError);
    CHECK_THROWS_AS(step_dynamics(trim.state, trim.actuators, p, 0.03), InputError);

    auto s = trim.state;
    s.euler(1) = 88.99 * M_PI / 180.0;
    s.omega(1) = 1.0;
    try {
        step_dynamics(s, trim.actuators, p, 0.004, {}, 77);
        FAIL("expected a fault");
    } catch (const FaultError& e) {
        CHECK(e.step() == 77);
    }
}

TEST_CASE("non-finite state reports a fault") {
    const auto& p = test::small_uav();
    auto s = find_trim(p, 18.0).state;
    s.omega(0) = std::nan("");
    CHECK_THROWS_AS(step_dynamics(s, ActuatorState::from_params(p), p, 0.004), FaultError);
}

TEST_CASE("aircraft parameter validation") {
    AircraftParams p = test::small_uav();
    p.mass = 0.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = test::small_uav();
    p.inertia(1) = -1.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    CHECK_THROWS_AS(find_trim(test::small_uav(), 0.0), InputError);
}
