/**
 * @file mission.cpp
 * @brief Mission sequencing and polyline distance.
 */
#include "afw/mission.hpp"

#include "afw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace afw::mission {

void MissionPlan::validate() const {
    if (waypoints.size() < 2) throw InputError("mission: at least two waypoints are required");
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        const auto& w = waypoints[i];
        if (!w.position.allFinite()) throw InputError("mission: waypoint " + std::to_string(i) + " is not finite");
        if (!(w.airspeed_s > 0.0)) throw InputError("mission: waypoint " + std::to_string(i) + " needs airspeed > 0");
        if (!(w.acceptance_radius > 0.0)) {
            throw InputError("mission: waypoint " + std::to_string(i) + " needs acceptance radius > 0");
        }
    }
    for (const auto& leg : legs()) {
        if (!(leg.horizontal_length() > 0.0)) throw InputError("mission: coincident consecutive waypoints");
    }
}

PathSegment MissionPlan::leg_into(std::size_t index) const {
    const std::size_t n = waypoints.size();
    if (index >= n) throw InputError("mission: waypoint index out of range");
    if (index > 0) return {waypoints[index - 1].position, waypoints[index].position};
    if (loop) return {waypoints[n - 1].position, waypoints[0].position};
    const Vec3 first = waypoints[0].position;
    return {first - (waypoints[1].position - first), first};
}

std::vector<PathSegment> MissionPlan::legs() const {
    std::vector<PathSegment> out;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        out.push_back({waypoints[i - 1].position, waypoints[i].position});
    }
    if (loop && waypoints.size() > 1) out.push_back({waypoints.back().position, waypoints.front().position});
    return out;
}

MissionUpdate advance_mission(const MissionPlan& plan, const Vec3& r_m, std::size_t active_index) {
    const std::size_t n = plan.waypoints.size();
    if (active_index >= n) throw InputError("advance_mission: active index out of range");

    MissionUpdate out;
    out.active_index = active_index;
    const Waypoint& target = plan.waypoints[active_index];
    const double dist = (target.position - r_m).head<2>().norm();
    if (dist <= target.acceptance_radius) {
        out.advanced = true;
        if (active_index + 1 < n) {
            out.active_index = active_index + 1;
        } else if (plan.loop) {
            out.active_index = 0;
        } else {
            out.complete = true;
        }
    }
    const Waypoint& next = plan.waypoints[out.active_index];
    out.r_s = next.position;
    out.airspeed_s = next.airspeed_s;
    out.segment = plan.leg_into(out.active_index);
    return out;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double cross_track_error(const Vec3& r_m, const MissionPlan& plan) {
    double best = std::numeric_limits<double>::infinity();
    const Vec2 p = r_m.head<2>();
    for (const auto& leg : plan.legs()) {
        best = std::min(best, distance_to_segment(p, leg.start.head<2>(), leg.end.head<2>()));
    }
    return best;
}

MissionPlan rectangular_circuit(double leg_length, double altitude, double airspeed,
                                double acceptance_radius, bool clockwise) {
    const double h = 0.5 * leg_length;
    const double side = clockwise ? 1.0 : -1.0;
    MissionPlan plan;
    plan.loop = true;
    for (const auto& [n, e] : {std::pair{h, h}, {-h, h}, {-h, -h}, {h, -h}}) {
        plan.waypoints.push_back({Vec3(n, side * e, -altitude), airspeed, acceptance_radius});
    }
    return plan;
}

}  // namespace afw::mission
