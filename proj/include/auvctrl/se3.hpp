#pragma once

#include <cmath>
#include <stdexcept>

#include "auvctrl/common.hpp"

namespace auvctrl {

// Tangent-space 6-vector, ordered (linear; angular). The ordering matches the
// 6-DOF wrench convention used by the dynamics module: surge, sway, heave,
// roll, pitch, yaw.
using Twist = Vector6d;

// Thrown by log_map when the rotation angle is within 1e-6 of pi, where the
// principal log branch is ill-conditioned.
struct AngleNearPi : std::domain_error {
    AngleNearPi() : std::domain_error("se3: rotation angle too close to pi for log_map") {}
};

namespace detail {
// Below this rotation angle the Rodrigues coefficients switch to their
// Taylor expansions.
inline constexpr double kSmallAngle = 1e-7;
// The V-matrix coefficients suffer catastrophic cancellation well above
// kSmallAngle (error ~ eps/theta^2), so they switch to series earlier.
inline constexpr double kTaylorV = 1e-2;
}  // namespace detail

/**
 * Unit quaternion with the scalar part canonicalized to w >= 0.
 *
 * Every constructor normalizes, so the unit-norm invariant holds after any
 * chain of operations. q and -q represent the same rotation; the w >= 0
 * convention makes equality tests and angle extraction unambiguous.
 */
class UnitQuaternion {
  public:
    UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}

    UnitQuaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
        normalize();
    }

    static UnitQuaternion identity() { return UnitQuaternion(); }

    static UnitQuaternion from_axis_angle(const Eigen::Vector3d& axis, double angle) {
        return from_rotation_vector(axis.normalized() * angle);
    }

    // SO(3) exponential of a rotation vector (axis * angle).
    static UnitQuaternion from_rotation_vector(const Eigen::Vector3d& omega) {
        const double theta = omega.norm();
        double half_sinc;  // sin(theta/2) / theta
        if (theta < detail::kSmallAngle) {
            half_sinc = 0.5 - theta * theta / 48.0;
        } else {
            half_sinc = std::sin(0.5 * theta) / theta;
        }
        return UnitQuaternion(std::cos(0.5 * theta), half_sinc * omega.x(), half_sinc * omega.y(),
                              half_sinc * omega.z());
    }

    // SO(3) logarithm. Result magnitude lies in [0, pi] because w >= 0.
    Eigen::Vector3d to_rotation_vector() const {
        const Eigen::Vector3d vec(x_, y_, z_);
        const double s = vec.norm();
        if (s < detail::kSmallAngle) {
            return vec * (2.0 / w_);
        }
        const double theta = 2.0 * std::atan2(s, w_);
        return vec * (theta / s);
    }

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

    UnitQuaternion conjugate() const {
        UnitQuaternion q;
        q.w_ = w_;
        q.x_ = -x_;
        q.y_ = -y_;
        q.z_ = -z_;
        return q;
    }

    // Hamilton product, renormalized.
    UnitQuaternion operator*(const UnitQuaternion& o) const {
        return UnitQuaternion(w_ * o.w_ - x_ * o.x_ - y_ * o.y_ - z_ * o.z_,
                              w_ * o.x_ + x_ * o.w_ + y_ * o.z_ - z_ * o.y_,
                              w_ * o.y_ - x_ * o.z_ + y_ * o.w_ + z_ * o.x_,
                              w_ * o.z_ + x_ * o.y_ - y_ * o.x_ + z_ * o.w_);
    }

    Eigen::Vector3d rotate(const Eigen::Vector3d& v) const {
        // v' = v + 2 w (q_v x v) + 2 q_v x (q_v x v)
        const Eigen::Vector3d qv(x_, y_, z_);
        const Eigen::Vector3d t = 2.0 * qv.cross(v);
        return v + w_ * t + qv.cross(t);
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d r;
        const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
        const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
        const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
        r << 1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy),
            2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx),
            2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy);
        return r;
    }

    // Rotation angle in [0, pi].
    double angle() const { return 2.0 * std::atan2(Eigen::Vector3d(x_, y_, z_).norm(), w_); }

  private:
    void normalize() {
        const double n2 = w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_;
        if (!(n2 > 0.0) || !std::isfinite(n2)) {
            throw std::invalid_argument("UnitQuaternion: non-normalizable components");
        }
        // Skip the division when already unit to machine precision so that
        // identity operations are bit-exact (equilibrium states must map to
        // themselves exactly under composition with the identity).
        double inv = 1.0;
        if (std::abs(n2 - 1.0) > 1e-12) inv = 1.0 / std::sqrt(n2);
        if (w_ < 0.0) inv = -inv;
        if (inv != 1.0) {
            w_ *= inv;
            x_ *= inv;
            y_ *= inv;
            z_ *= inv;
        }
    }

    double w_, x_, y_, z_;
};

// Rotation angle between two unit quaternions, angle(q^-1 * q_des), in
// [0, pi]. Insensitive to the sign ambiguity of either argument.
inline double quat_angle_error(const UnitQuaternion& q, const UnitQuaternion& q_des) {
    const UnitQuaternion rel = q.conjugate() * q_des;
    // rel.w() >= 0 after canonicalization, so the angle is already principal.
    return rel.angle();
}

/**
 * Rigid-body pose: position in the world frame plus a unit quaternion.
 */
struct Pose {
    Eigen::Vector3d position{Eigen::Vector3d::Zero()};
    UnitQuaternion orientation{};

    static Pose identity() { return Pose{}; }

    // this * other (right composition).
    Pose compose(const Pose& other) const {
        Pose out;
        out.position = position + orientation.rotate(other.position);
        out.orientation = orientation * other.orientation;
        return out;
    }

    Pose inverse() const {
        Pose out;
        out.orientation = orientation.conjugate();
        out.position = -out.orientation.rotate(position);
        return out;
    }
};

// Closed-form SE(3) exponential: Rodrigues rotation plus the V-matrix
// coupling of the translational part.
inline Pose exp_map(const Twist& xi) {
    const Eigen::Vector3d v = xi.head<3>();
    const Eigen::Vector3d omega = xi.tail<3>();
    const double theta = omega.norm();

    Pose out;
    out.orientation = UnitQuaternion::from_rotation_vector(omega);

    double a, b;  // V = I + a*[w]x + b*[w]x^2
    const double t2 = theta * theta;
    if (theta < detail::kTaylorV) {
        a = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        b = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    } else {
        const double sh = std::sin(0.5 * theta);
        a = 2.0 * sh * sh / t2;  // (1 - cos) without cancellation
        b = (theta - std::sin(theta)) / (t2 * theta);
    }
    const Eigen::Vector3d wv = omega.cross(v);
    out.position = v + a * wv + b * omega.cross(wv);
    return out;
}

// Principal-branch SE(3) logarithm, inverse of exp_map. Throws AngleNearPi
// when the rotation angle is within 1e-6 of pi.
inline Twist log_map(const Pose& m) {
    const double theta = m.orientation.angle();
    if (theta > M_PI - 1e-6) {
        throw AngleNearPi();
    }
    const Eigen::Vector3d omega = m.orientation.to_rotation_vector();

    double b;  // V^-1 = I - 1/2 [w]x + b [w]x^2
    if (theta < detail::kTaylorV) {
        const double t2 = theta * theta;
        b = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    } else {
        // 1 - (theta/2) cot(theta/2), via half-angle to avoid cancellation
        b = (1.0 - 0.5 * theta * std::cos(0.5 * theta) / std::sin(0.5 * theta)) /
            (theta * theta);
    }
    const Eigen::Vector3d& p = m.position;
    const Eigen::Vector3d wp = omega.cross(p);

    Twist xi;
    xi.head<3>() = p - 0.5 * wp + b * omega.cross(wp);
    xi.tail<3>() = omega;
    return xi;
}

// Adjoint of a pose: maps a body-frame twist to the world frame.
//   [ R   [p]x R ]
//   [ 0     R    ]
inline Matrix6d adjoint(const Pose& m) {
    const Eigen::Matrix3d r = m.orientation.matrix();
    Matrix6d adj = Matrix6d::Zero();
    adj.topLeftCorner<3, 3>() = r;
    adj.topRightCorner<3, 3>() = skew(m.position) * r;
    adj.bottomRightCorner<3, 3>() = r;
    return adj;
}

// Right-plus: m * Exp(xi * dt), with xi expressed in the body frame of m.
inline Pose oplus(const Pose& m, const Twist& xi, double dt) {
    return m.compose(exp_map(xi * dt));
}

}  // namespace auvctrl
