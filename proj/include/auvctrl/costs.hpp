#pragma once

#include <cmath>
#include <vector>

#include "auvctrl/dynamics.hpp"
#include "auvctrl/se3.hpp"

namespace auvctrl {

// Waypoint target: a desired pose plus desired body velocity (zero for
// station-keeping at the waypoint).
struct GoalSpec {
    Pose pose{};
    Twist velocity{Twist::Zero()};
};

/**
 * Diagonal weights of the tracking error
 *   e = (position error [3], orientation angle [1], velocity error [6]).
 *
 * The default cost is the weighted norm sqrt(e^T Q e); `squared` switches to
 * the quadratic form e^T Q e instead.
 */
struct CostWeights {
    Eigen::Matrix<double, 10, 1> q;
    bool squared{false};

    CostWeights() {
        q << 10.0, 10.0, 10.0, 100.0, 10.0, 10.0, 10.0, 10.0, 10.0, 10.0;
    }
};

// Vertical (world-z aligned) cylinder.
struct CylinderObstacle {
    Eigen::Vector3d center{Eigen::Vector3d::Zero()};
    double radius{0.0};
    double half_height{0.0};
};

// Tracking error in the 10-dimensional cost space: world-frame position
// error, rotation angle to the goal attitude, body-frame velocity error.
inline Eigen::Matrix<double, 10, 1> tracking_error(const VehicleState& x, const GoalSpec& goal) {
    Eigen::Matrix<double, 10, 1> e;
    e.head<3>() = x.pose.position - goal.pose.position;
    e[3] = quat_angle_error(x.pose.orientation, goal.pose.orientation);
    e.tail<6>() = x.velocity - goal.velocity;
    return e;
}

inline double step_cost(const VehicleState& x, const GoalSpec& goal, const CostWeights& w) {
    const auto e = tracking_error(x, goal);
    const double quad = e.dot(w.q.cwiseProduct(e));
    return w.squared ? quad : std::sqrt(quad);
}

// The terminal cost deliberately reuses the step cost: the target is a
// static waypoint, so proximity at the end of the horizon is valued the
// same way as along it.
inline double terminal_cost(const VehicleState& x, const GoalSpec& goal, const CostWeights& w) {
    return step_cost(x, goal, w);
}

// Point-with-margin collision test against vertical cylinders: inside if
// horizontally within radius+margin of the axis AND vertically within
// half_height+margin of the center plane.
inline bool check_collision(const VehicleState& x, const std::vector<CylinderObstacle>& obstacles,
                            double margin) {
    const Eigen::Vector3d& p = x.pose.position;
    for (const auto& c : obstacles) {
        const double dx = p.x() - c.center.x();
        const double dy = p.y() - c.center.y();
        const double r = c.radius + margin;
        if (dx * dx + dy * dy <= r * r &&
            std::abs(p.z() - c.center.z()) <= c.half_height + margin) {
            return true;
        }
    }
    return false;
}

/**
 * The cost function used by the rollout engine: waypoint tracking with
 * cylinder-obstacle rejection. Satisfies the CostFunction shape expected by
 * rollout_cost (step / terminal / collides).
 */
struct WaypointCost {
    GoalSpec goal{};
    CostWeights weights{};
    std::vector<CylinderObstacle> obstacles{};
    double margin{1.0};

    double step(const VehicleState& x) const { return step_cost(x, goal, weights); }
    double terminal(const VehicleState& x) const { return terminal_cost(x, goal, weights); }
    bool collides(const VehicleState& x) const { return check_collision(x, obstacles, margin); }
};

}  // namespace auvctrl
