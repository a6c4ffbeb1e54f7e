#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "auvctrl/se3.hpp"

using namespace auvctrl;

namespace {

// Independent fine-step integrator for the body-frame pose ODE
//   p' = R v,  R' = R [w]x
// using raw Eigen quaternions so it shares no code with exp_map.
Pose integrate_body_twist(const Twist& xi, double duration, int steps) {
    const Eigen::Vector3d v = xi.head<3>();
    const Eigen::Vector3d w = xi.tail<3>();
    const double h = duration / steps;
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
    for (int i = 0; i < steps; ++i) {
        p += q * v * h;
        const Eigen::Vector3d dw = w * h;
        const double angle = dw.norm();
        Eigen::Quaterniond dq = Eigen::Quaterniond::Identity();
        if (angle > 0.0) {
            dq = Eigen::Quaterniond(Eigen::AngleAxisd(angle, dw / angle));
        }
        q = (q * dq).normalized();
    }
    Pose out;
    out.position = p;
    out.orientation = UnitQuaternion(q.w(), q.x(), q.y(), q.z());
    return out;
}

std::mt19937& rng() {
    static std::mt19937 gen(20240817u);
    return gen;
}

Eigen::Vector3d random_vec3(double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng()), d(rng()), d(rng())};
}

Twist random_twist(double max_rot) {
    Twist xi;
    xi.head<3>() = random_vec3(5.0);
    Eigen::Vector3d w = random_vec3(1.0);
    if (w.norm() < 1e-12) w = Eigen::Vector3d::UnitX();
    std::uniform_real_distribution<double> ang(0.0, max_rot);
    xi.tail<3>() = w.normalized() * ang(rng());
    return xi;
}

Pose random_pose() {
    Pose m = exp_map(random_twist(M_PI - 1e-2));
    m.position = random_vec3(10.0);
    return m;
}

double pose_distance(const Pose& a, const Pose& b) {
    return (a.position - b.position).norm() + quat_angle_error(a.orientation, b.orientation);
}

}  // namespace

TEST_CASE("quaternion constructor normalizes and canonicalizes") {
    UnitQuaternion q(2.0, 0.0, 0.0, 0.0);
    CHECK(q.w() == Catch::Approx(1.0));
    CHECK(std::abs(q.norm() - 1.0) < 1e-12);

    // Negative scalar part flips sign of the whole quaternion.
    UnitQuaternion qn(-1.0, 0.0, 0.0, 1.0);
    CHECK(qn.w() == Catch::Approx(1.0 / std::sqrt(2.0)));
    CHECK(qn.z() == Catch::Approx(-1.0 / std::sqrt(2.0)));

    CHECK_THROWS_AS(UnitQuaternion(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(UnitQuaternion(std::nan(""), 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("quaternion norm stays unit through long operation chains") {
    UnitQuaternion q;
    for (int i = 0; i < 10000; ++i) {
        q = q * UnitQuaternion::from_rotation_vector(random_vec3(0.5));
    }
    CHECK(std::abs(q.norm() - 1.0) < 1e-9);
}

TEST_CASE("rotate agrees with the rotation matrix") {
    for (int i = 0; i < 100; ++i) {
        const UnitQuaternion q = UnitQuaternion::from_rotation_vector(random_vec3(2.0));
        const Eigen::Vector3d v = random_vec3(3.0);
        CHECK((q.rotate(v) - q.matrix() * v).norm() < 1e-12);
    }
}

TEST_CASE("rotation-vector roundtrip") {
    for (int i = 0; i < 1000; ++i) {
        const Twist xi = random_twist(M_PI - 1e-3);
        const Eigen::Vector3d w = xi.tail<3>();
        const UnitQuaternion q = UnitQuaternion::from_rotation_vector(w);
        CHECK((q.to_rotation_vector() - w).norm() < 1e-9);
    }
    // Small-angle branch.
    const Eigen::Vector3d tiny(1e-9, -2e-9, 5e-10);
    const UnitQuaternion q = UnitQuaternion::from_rotation_vector(tiny);
    CHECK((q.to_rotation_vector() - tiny).norm() < 1e-15);
}

TEST_CASE("oplus identity and pure-translation cases") {
    const Pose id = Pose::identity();
    CHECK(pose_distance(oplus(id, Twist::Zero(), 1.0), id) < 1e-15);

    Twist surge = Twist::Zero();
    surge(0) = 1.0;
    const Pose moved = oplus(id, surge, 2.0);
    CHECK((moved.position - Eigen::Vector3d(2.0, 0.0, 0.0)).norm() < 1e-12);
    CHECK(moved.orientation.angle() < 1e-12);
}

TEST_CASE("two quarter-turn yaws compose to a half turn") {
    Twist yaw = Twist::Zero();
    yaw(5) = M_PI / 2.0;
    Pose m = oplus(oplus(Pose::identity(), yaw, 1.0), yaw, 1.0);

    // Oracle: direct quaternion product of two quarter turns about z.
    const UnitQuaternion quarter = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI / 2.0);
    const UnitQuaternion half = quarter * quarter;
    CHECK(quat_angle_error(m.orientation, half) < 1e-12);
    CHECK(m.orientation.angle() == Catch::Approx(M_PI));
    CHECK(m.position.norm() < 1e-12);
}

TEST_CASE("exp_map trivial cases") {
    CHECK(pose_distance(exp_map(Twist::Zero()), Pose::identity()) < 1e-15);

    Twist rot = Twist::Zero();
    rot(5) = 0.7;
    const Pose m = exp_map(rot);
    CHECK(m.position.norm() < 1e-15);
    CHECK(quat_angle_error(m.orientation,
                           UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.7)) < 1e-12);
}

TEST_CASE("exp_map couples translation and rotation through the V-matrix") {
    // Unit surge while yawing a quarter turn traces a circular arc ending at
    // (2/pi, 2/pi, 0).
    Twist xi = Twist::Zero();
    xi(0) = 1.0;
    xi(5) = M_PI / 2.0;
    const Pose m = exp_map(xi);
    CHECK(m.position.x() == Catch::Approx(2.0 / M_PI));
    CHECK(m.position.y() == Catch::Approx(2.0 / M_PI));
    CHECK(std::abs(m.position.z()) < 1e-12);
}

TEST_CASE("exp_map matches fine-step integration of the body-frame ODE") {
    for (int i = 0; i < 20; ++i) {
        const Twist xi = random_twist(M_PI - 1e-2);
        const Pose closed = exp_map(xi);
        const Pose stepped = integrate_body_twist(xi, 1.0, 10000);
        // Euler converges at O(h); with 1e4 steps expect ~1e-4 agreement.
        CHECK((closed.position - stepped.position).norm() < 5e-3);
        CHECK(quat_angle_error(closed.orientation, stepped.orientation) < 5e-3);
    }
}

TEST_CASE("log_map inverts exp_map") {
    CHECK(log_map(Pose::identity()).norm() < 1e-15);
    for (int i = 0; i < 10000; ++i) {
        const Twist xi = random_twist(M_PI - 1e-3);
        CHECK((log_map(exp_map(xi)) - xi).norm() < 1e-9);
    }
}

TEST_CASE("exp_map reproduces random poses from their logs") {
    for (int i = 0; i < 1000; ++i) {
        const Pose m = random_pose();
        const Pose back = exp_map(log_map(m));
        CHECK(pose_distance(back, m) < 1e-9);
    }
}

TEST_CASE("log_map rejects rotations at the principal-branch boundary") {
    Pose near_pi;
    near_pi.orientation = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI - 5e-7);
    CHECK_THROWS_AS(log_map(near_pi), AngleNearPi);

    Pose below;
    below.orientation = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI - 5e-6);
    CHECK_NOTHROW(log_map(below));
}

TEST_CASE("adjoint of identity is identity") {
    CHECK((adjoint(Pose::identity()) - Matrix6d::Identity()).norm() < 1e-15);
}

TEST_CASE("adjoint turns a yaw rate about an offset frame into linear velocity") {
    Pose m;
    m.position = Eigen::Vector3d(0.0, 1.0, 0.0);
    Twist yaw_rate = Twist::Zero();
    yaw_rate(5) = 1.0;
    const Twist world = adjoint(m) * yaw_rate;
    CHECK((world.head<3>() - Eigen::Vector3d(1.0, 0.0, 0.0)).norm() < 1e-12);
    CHECK((world.tail<3>() - Eigen::Vector3d(0.0, 0.0, 1.0)).norm() < 1e-12);
}

TEST_CASE("adjoint matches numeric differentiation of the moving frame") {
    // For a frame moving with constant body twist, the world-frame twist is
    //   angular = rotation vector of the left increment / h
    //   linear  = d/dt position - angular x position
    // (the velocity of the body point currently at the world origin).
    // Compare to Adj(m) * xi as h -> 0.
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const Pose m = random_pose();
        const Twist xi = random_twist(1.0);
        const Pose moved = oplus(m, xi, h);

        const Eigen::Vector3d pdot = (moved.position - m.position) / h;
        const UnitQuaternion dq = moved.orientation * m.orientation.conjugate();
        const Eigen::Vector3d ang = dq.to_rotation_vector() / h;
        const Eigen::Vector3d lin = pdot - ang.cross(m.position);

        const Twist predicted = adjoint(m) * xi;
        CHECK((predicted.head<3>() - lin).norm() < 1e-4);
        CHECK((predicted.tail<3>() - ang).norm() < 1e-4);
    }
}

TEST_CASE("adjoint is a homomorphism under composition") {
    for (int i = 0; i < 1000; ++i) {
        const Pose a = random_pose();
        const Pose b = random_pose();
        const Matrix6d lhs = adjoint(a.compose(b));
        const Matrix6d rhs = adjoint(a) * adjoint(b);
        CHECK((lhs - rhs).norm() < 1e-9);
    }
}

TEST_CASE("pose compose and inverse") {
    for (int i = 0; i < 200; ++i) {
        const Pose m = random_pose();
        CHECK(pose_distance(m.compose(m.inverse()), Pose::identity()) < 1e-12);
        CHECK(pose_distance(m.inverse().compose(m), Pose::identity()) < 1e-12);
    }
}

TEST_CASE("oplus is first-order in dt") {
    for (double dt : {1e-3, 1e-4}) {
        for (int i = 0; i < 20; ++i) {
            const Pose m = random_pose();
            const Twist xi = random_twist(1.0);
            const Pose stepped = oplus(m, xi, dt);

            const Eigen::Vector3d lin_first =
                m.position + dt * (m.orientation.rotate(xi.head<3>()));
            const UnitQuaternion rot_first =
                m.orientation * UnitQuaternion::from_rotation_vector(xi.tail<3>() * dt);

            CHECK((stepped.position - lin_first).norm() < 10.0 * dt * dt);
            CHECK(quat_angle_error(stepped.orientation, rot_first) < 10.0 * dt * dt);
        }
    }
}

TEST_CASE("quat_angle_error basic values") {
    const UnitQuaternion id;
    CHECK(quat_angle_error(id, id) == 0.0);

    const UnitQuaternion half = UnitQuaternion::from_axis_angle(Eigen::Vector3d::UnitZ(), M_PI);
    CHECK(quat_angle_error(id, half) == Catch::Approx(M_PI));

    for (int i = 0; i < 100; ++i) {
        Eigen::Vector3d axis = random_vec3(1.0);
        if (axis.norm() < 1e-9) axis = Eigen::Vector3d::UnitY();
        const UnitQuaternion q = UnitQuaternion::from_axis_angle(axis, 0.3);
        CHECK(std::abs(quat_angle_error(id, q) - 0.3) < 1e-9);
    }
}

TEST_CASE("quat_angle_error is symmetric and double-cover insensitive") {
    for (int i = 0; i < 200; ++i) {
        const UnitQuaternion a = UnitQuaternion::from_rotation_vector(random_vec3(2.0));
        const UnitQuaternion b = UnitQuaternion::from_rotation_vector(random_vec3(2.0));
        CHECK(std::abs(quat_angle_error(a, b) - quat_angle_error(b, a)) < 1e-12);

        const UnitQuaternion neg_b(-b.w(), -b.x(), -b.y(), -b.z());
        CHECK(std::abs(quat_angle_error(a, b) - quat_angle_error(a, neg_b)) < 1e-12);
        CHECK(quat_angle_error(b, neg_b) < 1e-12);

        const double err = quat_angle_error(a, b);
        CHECK(err >= 0.0);
        CHECK(err <= M_PI);
    }
}
