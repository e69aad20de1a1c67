/**
 * @file mission.hpp
 * @brief Waypoint plans, leg sequencing and cross-track geometry.
 *
 * All geometry used for guidance and the tracking metric is horizontal
 * (north-east); the down component only feeds the altitude setpoint.
 */
#pragma once

#include "afw/signals.hpp"

#include <cstddef>
#include <vector>

namespace afw::mission {

struct Waypoint {
    Vec3 position = Vec3::Zero();
    double airspeed_s = 0.0;
    double acceptance_radius = 25.0;
};

struct PathSegment {
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();

    double horizontal_length() const { return (end - start).head<2>().norm(); }
};

struct MissionPlan {
    std::vector<Waypoint> waypoints;
    bool loop = true;

    /// Throws InputError unless there are >= 2 waypoints, positive speeds and
    /// radii, and no two consecutive waypoints share a horizontal position.
    void validate() const;

    /// Leg flown while waypoint `index` is the target.  For index 0 the
    /// leg comes from the last waypoint when looping; otherwise it is the
    /// first leg extended backwards through waypoint 0.
    PathSegment leg_into(std::size_t index) const;

    /// Every leg of the polyline, including the closing leg when looping.
    std::vector<PathSegment> legs() const;
};

struct MissionUpdate {
    Vec3 r_s = Vec3::Zero();
    double airspeed_s = 0.0;
    PathSegment segment;
    std::size_t active_index = 0;
    /// True when the target was reached on this call.
    bool advanced = false;
    /// Non-looping plan whose last waypoint has been reached.
    bool complete = false;
};

/// Moves to the next waypoint when r_m is horizontally inside the current
/// target's acceptance radius.  Never skips more than one waypoint.
MissionUpdate advance_mission(const MissionPlan& plan, const Vec3& r_m, std::size_t active_index);

/// Horizontal distance from p to the segment, clamped at its endpoints.
double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Minimum horizontal distance from r_m to the mission polyline.
double cross_track_error(const Vec3& r_m, const MissionPlan& plan);

/// Rectangular circuit centred on the origin, starting at the north-east
/// (or north-west) corner and flown clockwise (counter-clockwise) from above.
MissionPlan rectangular_circuit(double leg_length, double altitude, double airspeed,
                                double acceptance_radius = 25.0, bool clockwise = true);

}  // namespace afw::mission
