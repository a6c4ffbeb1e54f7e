#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "auvctrl/costs.hpp"

using namespace auvctrl;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(90210u);
    return gen;
}

double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

VehicleState random_state() {
    VehicleState s;
    s.pose.position = {uniform(-10, 10), uniform(-10, 10), uniform(-10, 10)};
    s.pose.orientation = UnitQuaternion::from_rotation_vector(
        {uniform(-1.5, 1.5), uniform(-1.5, 1.5), uniform(-1.5, 1.5)});
    for (int i = 0; i < 6; ++i) s.velocity[i] = uniform(-2, 2);
    return s;
}

}  // namespace

TEST_CASE("step cost is zero exactly at the goal and only there") {
    GoalSpec goal;
    goal.pose.position = {1.0, 2.0, 3.0};
    goal.pose.orientation = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.5);
    CostWeights w;

    VehicleState at_goal;
    at_goal.pose = goal.pose;
    at_goal.velocity = goal.velocity;
    CHECK(step_cost(at_goal, goal, w) == 0.0);

    // Perturb each error coordinate in turn: cost must become positive.
    for (int axis = 0; axis < 3; ++axis) {
        VehicleState s = at_goal;
        s.pose.position[axis] += 0.1;
        CHECK(step_cost(s, goal, w) > 0.0);
    }
    {
        VehicleState s = at_goal;
        s.pose.orientation =
            goal.pose.orientation * UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitX(), 0.2);
        CHECK(step_cost(s, goal, w) > 0.0);
    }
    for (int i = 0; i < 6; ++i) {
        VehicleState s = at_goal;
        s.velocity[i] += 0.1;
        CHECK(step_cost(s, goal, w) > 0.0);
    }
}

TEST_CASE("unit position error with weight 10 costs sqrt(10)") {
    GoalSpec goal;
    CostWeights w;
    VehicleState s;
    s.pose.position = {1.0, 0.0, 0.0};
    CHECK(step_cost(s, goal, w) == Catch::Approx(std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("quarter-turn yaw error with angle weight 100 costs 10*pi/2") {
    GoalSpec goal;
    CostWeights w;
    VehicleState s;
    s.pose.orientation = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI / 2.0);
    CHECK(step_cost(s, goal, w) == Catch::Approx(10.0 * M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("terminal cost is the step cost") {
    GoalSpec goal;
    goal.pose.position = {2.0, -1.0, 0.5};
    CostWeights w;
    for (int i = 0; i < 100; ++i) {
        const VehicleState s = random_state();
        CHECK(terminal_cost(s, goal, w) == step_cost(s, goal, w));  // bitwise
    }
}

TEST_CASE("squared form is the square of the norm form") {
    GoalSpec goal;
    CostWeights w;
    CostWeights w2;
    w2.squared = true;
    for (int i = 0; i < 100; ++i) {
        const VehicleState s = random_state();
        const double n = step_cost(s, goal, w);
        CHECK(step_cost(s, goal, w2) == Catch::Approx(n * n).epsilon(1e-12));
    }
}

TEST_CASE("cost never decreases when one error coordinate grows") {
    GoalSpec goal;
    CostWeights w;

    for (int trial = 0; trial < 100; ++trial) {
        VehicleState s = random_state();
        const double base = step_cost(s, goal, w);

        const int axis = static_cast<int>(uniform(0.0, 2.999));
        VehicleState worse = s;
        // Push the chosen position coordinate further from the goal.
        const double sign = worse.pose.position[axis] >= 0.0 ? 1.0 : -1.0;
        worse.pose.position[axis] += sign * uniform(0.0, 2.0);
        CHECK(step_cost(worse, goal, w) >= base);

        VehicleState faster = s;
        const int vaxis = static_cast<int>(uniform(0.0, 5.999));
        const double vsign = faster.velocity[vaxis] >= 0.0 ? 1.0 : -1.0;
        faster.velocity[vaxis] += vsign * uniform(0.0, 2.0);
        CHECK(step_cost(faster, goal, w) >= base);
    }
}

TEST_CASE("scaling the weights scales the cost by sqrt(c) and preserves ranking") {
    GoalSpec goal;
    CostWeights w;
    CostWeights scaled;
    const double c = 7.3;
    scaled.q = w.q * c;

    double best = 1e300, best_scaled = 1e300;
    int argmin = -1, argmin_scaled = -1;
    for (int i = 0; i < 50; ++i) {
        const VehicleState s = random_state();
        const double a = step_cost(s, goal, w);
        const double b = step_cost(s, goal, scaled);
        CHECK(b == Catch::Approx(std::sqrt(c) * a).epsilon(1e-12));
        if (a < best) best = a, argmin = i;
        if (b < best_scaled) best_scaled = b, argmin_scaled = i;
        rng();  // keep streams aligned between loops
    }
    CHECK(argmin == argmin_scaled);
}

TEST_CASE("collision test handles boundaries and empty lists") {
    VehicleState s;
    CHECK_FALSE(check_collision(s, {}, 1.0));

    CylinderObstacle c;
    c.center = {5.0, 0.0, 0.0};
    c.radius = 1.5;
    c.half_height = 2.5;

    // On the axis at mid-height.
    s.pose.position = c.center;
    CHECK(check_collision(s, {c}, 1.0));

    // Just outside the inflated radius.
    s.pose.position = {5.0 + c.radius + 1.0 + 0.01, 0.0, 0.0};
    CHECK_FALSE(check_collision(s, {c}, 1.0));

    // Just inside the inflated radius.
    s.pose.position = {5.0 + c.radius + 1.0 - 0.01, 0.0, 0.0};
    CHECK(check_collision(s, {c}, 1.0));

    // Horizontally inside but far above the cap.
    s.pose.position = {5.0, 0.0, c.half_height + 1.0 + 0.01};
    CHECK_FALSE(check_collision(s, {c}, 1.0));
}

TEST_CASE("collision is monotone in the margin") {
    CylinderObstacle c;
    c.center = {0.0, 0.0, 0.0};
    c.radius = 1.0;
    c.half_height = 1.0;

    for (int i = 0; i < 500; ++i) {
        VehicleState s;
        s.pose.position = {uniform(-4, 4), uniform(-4, 4), uniform(-4, 4)};
        const double m = uniform(0.0, 1.5);
        if (check_collision(s, {c}, m)) {
            CHECK(check_collision(s, {c}, m + uniform(0.0, 1.0)));
        }
    }
}
