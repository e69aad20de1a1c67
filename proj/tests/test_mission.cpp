#include "afw/errors.hpp"
#include "afw/mission.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace afw;
using namespace afw::mission;

namespace {

MissionPlan two_point(bool loop) {
    MissionPlan p;
    p.loop = loop;
    p.waypoints = {{Vec3(0, 0, -100), 18.0, 25.0}, {Vec3(300, 0, -100), 20.0, 25.0}};
    return p;
}

MissionPlan single_leg() {
    MissionPlan p = two_point(false);
    p.waypoints[1].position = Vec3(100, 0, -100);
    return p;
}

}  // namespace

TEST_CASE("sequencing") {
    const auto plan = two_point(true);
    SUBCASE("far from target keeps the index") {
        const auto u = advance_mission(plan, Vec3(100, 0, -100), 1);
        CHECK(u.active_index == 1);
        CHECK_FALSE(u.advanced);
        CHECK(u.r_s == plan.waypoints[1].position);
        CHECK(u.airspeed_s == 20.0);
    }
    SUBCASE("inside the radius moves on, new leg starts at the old target") {
        const auto u = advance_mission(plan, Vec3(290, 10, -60), 1);
        CHECK(u.advanced);
        CHECK(u.active_index == 0);
        CHECK(u.segment.start == plan.waypoints[1].position);
        CHECK(u.segment.end == plan.waypoints[0].position);
    }
    SUBCASE("radius is horizontal") {
        CHECK(advance_mission(plan, Vec3(300, 0, 500), 1).advanced);
        CHECK_FALSE(advance_mission(plan, Vec3(300, 26, -100), 1).advanced);
    }
    SUBCASE("looping two-waypoint plan cycles") {
        std::size_t idx = 0;
        std::vector<std::size_t> seen;
        for (int i = 0; i < 4; ++i) {
            const auto u = advance_mission(plan, plan.waypoints[idx].position, idx);
            idx = u.active_index;
            seen.push_back(idx);
        }
        CHECK(seen == std::vector<std::size_t>{1, 0, 1, 0});
    }
    SUBCASE("non-looping plan signals completion") {
        const auto p = two_point(false);
        const auto u = advance_mission(p, p.waypoints[1].position, 1);
        CHECK(u.complete);
        CHECK(u.active_index == 1);
    }
    SUBCASE("never skips a waypoint even when several are in range") {
        MissionPlan p;
        p.waypoints = {{Vec3(0, 0, 0), 18, 50}, {Vec3(10, 0, 0), 18, 50}, {Vec3(20, 0, 0), 18, 50}};
        const auto u = advance_mission(p, Vec3(10, 0, 0), 0);
        CHECK(u.active_index == 1);
    }
    SUBCASE("invalid index") {
        CHECK_THROWS_AS(advance_mission(plan, Vec3::Zero(), 2), InputError);
    }
}

TEST_CASE("leg into the first waypoint") {
    CHECK(two_point(true).leg_into(0).start == Vec3(300, 0, -100));
    const auto open = two_point(false).leg_into(0);
    CHECK(open.start == Vec3(-300, 0, -100));
    CHECK(open.end == Vec3(0, 0, -100));
}

TEST_CASE("cross-track error") {
    const auto plan = single_leg();
    CHECK(cross_track_error(Vec3(40, 0, -100), plan) == 0.0);
    CHECK(cross_track_error(Vec3(50, 30, -100), plan) == 30.0);
    CHECK(cross_track_error(Vec3(110, 0, -100), plan) == 10.0);
    CHECK(cross_track_error(Vec3(50, 0, 0), plan) == 0.0);
}

TEST_CASE("cross-track error is nonnegative and rigid-motion invariant") {
    const auto plan = rectangular_circuit(400.0, 100.0, 18.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-400.0, 400.0);
    const double yaw = 0.7;
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    const Vec3 shift(123.0, -45.0, 7.0);
    MissionPlan moved = plan;
    for (auto& w : moved.waypoints) w.position = rot * w.position + shift;
    for (int i = 0; i < 500; ++i) {
        const Vec3 p(u(rng), u(rng), -100.0);
        const double e = cross_track_error(p, plan);
        REQUIRE(e >= 0.0);
        CHECK(std::abs(cross_track_error(rot * p + shift, moved) - e) < 1e-9);
    }
}

TEST_CASE("rectangular circuit") {
    const auto cw = rectangular_circuit(400.0, 100.0, 18.0);
    REQUIRE(cw.waypoints.size() == 4);
    for (const auto& leg : cw.legs()) CHECK(leg.horizontal_length() == 400.0);
    CHECK(cw.waypoints[0].position == Vec3(200, 200, -100));
    const auto ccw = rectangular_circuit(400.0, 100.0, 18.0, 25.0, false);
    CHECK(ccw.waypoints[0].position == Vec3(200, -200, -100));
    CHECK(ccw.waypoints[1].position == Vec3(-200, -200, -100));
}

TEST_CASE("plan validation") {
    MissionPlan p;
    p.waypoints = {{Vec3::Zero(), 18, 25}};
    CHECK_THROWS_AS(p.validate(), InputError);
    p = two_point(true);
    p.waypoints[1].airspeed_s = 0.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = two_point(true);
    p.waypoints[1].acceptance_radius = 0.0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = two_point(true);
    p.waypoints[1].position = Vec3(0, 0, -50);
    CHECK_THROWS_AS(p.validate(), InputError);
    CHECK_NOTHROW(two_point(true).validate());
}
