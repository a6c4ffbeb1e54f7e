#pragma once

#include <stdexcept>

#include "auvctrl/costs.hpp"
#include "auvctrl/dynamics.hpp"

namespace auvctrl {

/**
 * Diagonal PID gains for the six body axes (surge, sway, heave, roll,
 * pitch, yaw), plus a per-axis anti-windup clamp applied to the error
 * integral itself.
 */
struct PidGains {
    Vector6d kp{Vector6d::Zero()};
    Vector6d ki{Vector6d::Zero()};
    Vector6d kd{Vector6d::Zero()};
    Vector6d integral_limit{Vector6d::Constant(500.0)};
};

// Outer (position) and inner (velocity) loop gains for the cascade scheme.
struct CascadeGains {
    PidGains position;
    PidGains velocity;
};

inline void validate(const PidGains& g) {
    if ((g.kp.array() < 0).any() || (g.ki.array() < 0).any() || (g.kd.array() < 0).any()) {
        throw ConfigError("pid gains must be non-negative");
    }
    if (!(g.integral_limit.array() > 0).all()) {
        throw ConfigError("pid integral limit must be positive per axis");
    }
    if (!g.kp.allFinite() || !g.ki.allFinite() || !g.kd.allFinite() ||
        !g.integral_limit.allFinite()) {
        throw ConfigError("pid gains must be finite");
    }
}

inline void validate(const CascadeGains& g) {
    validate(g.position);
    validate(g.velocity);
}

// Stock tuning for the single full-state loop.
inline PidGains single_pid_gains() {
    PidGains g;
    g.kp << 250, 250, 250, 800, 800, 800;
    g.ki << 100, 100, 100, 300, 300, 300;
    g.kd << 1950, 1950, 1950, 1000, 1000, 1000;
    return g;
}

// Stock tuning for the position/velocity cascade.
inline CascadeGains cascade_pid_gains() {
    CascadeGains g;
    g.position.kp << 10, 10, 10, 35, 35, 35;
    g.position.ki << 1.5, 1.5, 1.5, 10, 10, 10;
    g.position.kd << 35, 35, 35, 25, 25, 25;
    g.velocity.kp << 30, 30, 30, 50, 50, 50;
    g.velocity.ki << 15, 15, 15, 40, 40, 40;
    g.velocity.kd << 25, 25, 25, 30, 30, 30;
    return g;
}

/**
 * Body-frame pose error: the goal position expressed in the vehicle frame,
 * stacked with the rotation-vector log of the relative orientation. A
 * vehicle yawed +pi/2 looking at a goal 10 m down world-x sees the goal at
 * (0, -10, 0) and an orientation error of (0, 0, -pi/2).
 */
inline Vector6d pose_error(const VehicleState& x, const GoalSpec& goal) {
    const UnitQuaternion world_to_body = x.pose.orientation.conjugate();
    Vector6d e;
    e.head<3>() = world_to_body.rotate(goal.pose.position - x.pose.position);
    e.tail<3>() = (world_to_body * goal.pose.orientation).to_rotation_vector();
    return e;
}

/**
 * One diagonal PID channel bank over a 6-vector error signal. Holds the
 * integrator and previous-error state; single-owner use. The derivative is
 * the first difference of the error (zero on the first step) and the
 * integral is clamped per axis before the gain is applied.
 */
class PidLoop {
  public:
    explicit PidLoop(const PidGains& gains) : gains_(gains) { auvctrl::validate(gains_); }

    Vector6d step(const Vector6d& error, double dt) {
        if (!(dt > 0.0)) {
            throw std::invalid_argument("PidLoop::step: dt must be positive");
        }
        integral_ += error * dt;
        integral_ = integral_.cwiseMax(-gains_.integral_limit).cwiseMin(gains_.integral_limit);

        Vector6d derivative = Vector6d::Zero();
        if (primed_) {
            derivative = (error - prev_error_) / dt;
        }
        prev_error_ = error;
        primed_ = true;

        return gains_.kp.cwiseProduct(error) + gains_.ki.cwiseProduct(integral_) +
               gains_.kd.cwiseProduct(derivative);
    }

    void reset() {
        integral_.setZero();
        prev_error_.setZero();
        primed_ = false;
    }

    const Vector6d& integral() const { return integral_; }
    const PidGains& gains() const { return gains_; }

  private:
    PidGains gains_;
    Vector6d integral_{Vector6d::Zero()};
    Vector6d prev_error_{Vector6d::Zero()};
    bool primed_{false};
};

/**
 * Full-state PID: one loop acting on the stacked pose error (position part)
 * and velocity error (rate part), emitting a body wrench.
 */
class SinglePid {
  public:
    explicit SinglePid(const PidGains& gains = single_pid_gains()) : loop_(gains) {}

    Wrench step(const VehicleState& x, const GoalSpec& goal, double dt) {
        // Velocity feedback enters through the derivative term: the first
        // difference of the body-frame pose error is (minus) the body rate.
        return Wrench::from_vector(loop_.step(pose_error(x, goal), dt));
    }

    void reset() { loop_.reset(); }
    const PidLoop& loop() const { return loop_; }

  private:
    PidLoop loop_;
};

/**
 * Cascade PID: the outer loop turns the body-frame pose error into a
 * velocity reference, the inner loop tracks that reference against the
 * measured body velocity and emits the wrench.
 */
class CascadePid {
  public:
    explicit CascadePid(const CascadeGains& gains = cascade_pid_gains())
        : position_(gains.position), velocity_(gains.velocity) {}

    Wrench step(const VehicleState& x, const GoalSpec& goal, double dt) {
        const Vector6d v_ref = position_.step(pose_error(x, goal), dt);
        return Wrench::from_vector(velocity_.step(v_ref - x.velocity, dt));
    }

    void reset() {
        position_.reset();
        velocity_.reset();
    }
    const PidLoop& position_loop() const { return position_; }
    const PidLoop& velocity_loop() const { return velocity_; }

  private:
    PidLoop position_;
    PidLoop velocity_;
};

}  // namespace auvctrl
