#pragma once

#include <cmath>

#include "auvctrl/se3.hpp"
#include "auvctrl/vehicle.hpp"

namespace auvctrl {

// Raised when integration is asked to proceed from, or produces, states whose
// numbers have overflowed. Surfacing a typed error beats silently propagating
// NaN through controllers and logs.
class NonFiniteState : public std::runtime_error {
  public:
    NonFiniteState() : std::runtime_error("vehicle state is no longer finite") {}
    using std::runtime_error::runtime_error;
};

/**
 * Full vehicle state: pose in the world frame plus body-frame velocity
 * (surge, sway, heave, roll rate, pitch rate, yaw rate).
 */
struct VehicleState {
    Pose pose{};
    Twist velocity{Twist::Zero()};

    bool finite() const {
        return pose.position.allFinite() && velocity.allFinite() &&
               std::isfinite(pose.orientation.w());
    }
};

/**
 * Combined rigid-body + added-mass Coriolis matrix in the skew-symmetric
 * parameterization built from the total momentum M_tot * nu:
 *
 *   C(nu) = [    0      -S(p_lin) ]      p = M_tot * nu
 *           [ -S(p_lin) -S(p_ang) ]
 *
 * Always satisfies C + C^T = 0.
 */
inline Matrix6d coriolis(const VehicleModel& model, const Twist& nu) {
    const Vector6d p = model.total_mass() * nu;
    const Eigen::Matrix3d sa = skew(p.head<3>());
    const Eigen::Matrix3d sb = skew(p.tail<3>());
    Matrix6d c = Matrix6d::Zero();
    c.topRightCorner<3, 3>() = -sa;
    c.bottomLeftCorner<3, 3>() = -sa;
    c.bottomRightCorner<3, 3>() = -sb;
    return c;
}

// Velocity damping: full linear matrix plus diagonal quadratic term
// diag(d_i |nu_i|).
inline Matrix6d damping(const VehicleModel& model, const Twist& nu) {
    Matrix6d d = model.hydro().linear_damping;
    d.diagonal() += model.hydro().quadratic_damping.cwiseProduct(nu.cwiseAbs());
    return d;
}

/**
 * Gravity/buoyancy wrench acting on the body, expressed in the body frame.
 * World frame is ENU: weight m*g pulls toward -z at the CoG, buoyancy pushes
 * toward +z at the CoB. The returned wrench is the physical one (positive
 * heave component when positively buoyant); acceleration() adds it to the
 * applied wrench.
 */
inline Vector6d restoring(const VehicleModel& model, const Pose& pose) {
    const UnitQuaternion world_to_body = pose.orientation.conjugate();
    const Eigen::Vector3d f_gravity =
        world_to_body.rotate(Eigen::Vector3d(0.0, 0.0, -model.weight()));
    const Eigen::Vector3d f_buoyancy =
        world_to_body.rotate(Eigen::Vector3d(0.0, 0.0, model.hydro().buoyancy_force));

    Vector6d g;
    g.head<3>() = f_gravity + f_buoyancy;
    g.tail<3>() = model.body().cog.cross(f_gravity) + model.hydro().cob.cross(f_buoyancy);
    return g;
}

/**
 * Body-frame acceleration
 *
 *   nu_dot = M_tot^-1 (tau + g(pose) - C(nu) nu - D(nu) nu)
 *
 * where tau is the total applied wrench (control plus any external forces).
 * The Coriolis product is evaluated in cross-product form (force = w x p,
 * moment = w x h + v x p with p, h the linear/angular momenta) rather than
 * materializing C(nu); a test pins the equivalence.
 */
inline Twist acceleration(const VehicleModel& model, const VehicleState& state,
                          const Vector6d& tau) {
    const Twist& nu = state.velocity;
    const Vector6d momentum = model.total_mass() * nu;
    const Eigen::Vector3d v = nu.head<3>();
    const Eigen::Vector3d w = nu.tail<3>();
    const Eigen::Vector3d p_lin = momentum.head<3>();
    const Eigen::Vector3d p_ang = momentum.tail<3>();

    Vector6d rhs = tau + restoring(model, state.pose);
    rhs.head<3>() -= w.cross(p_lin);
    rhs.tail<3>() -= w.cross(p_ang) + v.cross(p_lin);
    rhs.noalias() -= model.hydro().linear_damping * nu;
    rhs.array() -= model.hydro().quadratic_damping.array() * nu.array().abs() * nu.array();

    return model.total_mass_inverse() * rhs;
}

// Body wrench produced by per-thruster commands, saturated to +-max_thrust.
// Accumulated column by column so callers can pass matrix columns without
// temporaries.
inline Wrench allocate(const ThrusterAllocation& alloc,
                       const Eigen::Ref<const Eigen::VectorXd>& commands) {
    if (commands.size() != alloc.count()) {
        throw DimensionMismatch("allocate: expected " + std::to_string(alloc.count()) +
                                " thruster commands, got " + std::to_string(commands.size()));
    }
    Vector6d w = Vector6d::Zero();
    for (Eigen::Index i = 0; i < alloc.count(); ++i) {
        const double c = std::clamp(commands[i], -alloc.max_thrust, alloc.max_thrust);
        w += c * alloc.tam.col(i);
    }
    return Wrench::from_vector(w);
}

// Least-norm thruster commands realizing a desired body wrench, via the
// pseudo-inverse of the allocation matrix. Exact for any wrench because the
// allocation matrix has full row rank; commands are NOT saturated here.
inline Eigen::VectorXd wrench_to_thrusts(const VehicleModel& model, const Wrench& wrench) {
    return model.allocation_pinv() * wrench.vector();
}

struct StepResult {
    VehicleState state;
    // True if any command exceeded max_thrust and was saturated. Saturation
    // is a warning, not an error: rollouts remain total.
    bool input_clamped{false};
};

/**
 * One explicit-midpoint (RK2) step of the coupled pose/velocity dynamics
 * with the thruster commands held constant across the step.
 *
 * Velocity advances through the standard midpoint stages; the pose advances
 * by composing with the exponential of the midpoint velocity, which is the
 * midpoint method on the pose manifold (and exact for constant twist).
 */
inline StepResult step(const VehicleModel& model, const VehicleState& state,
                       const Eigen::Ref<const Eigen::VectorXd>& commands, const Wrench& tau_ext,
                       double dt) {
    if (!(dt > 0.0) || dt > 0.2) {
        throw std::invalid_argument("step: dt must be in (0, 0.2]");
    }
    if (!state.finite()) {
        throw NonFiniteState();
    }

    StepResult out;
    out.input_clamped = (commands.cwiseAbs().array() > model.max_thrust()).any();

    const Vector6d tau = allocate(model.thrusters(), commands).vector() + tau_ext.vector();

    const Twist a1 = acceleration(model, state, tau);
    if (!a1.allFinite()) {
        throw NonFiniteState("acceleration overflowed during integration");
    }

    VehicleState mid;
    mid.velocity = state.velocity + 0.5 * dt * a1;
    mid.pose = oplus(state.pose, state.velocity, 0.5 * dt);

    const Twist a2 = acceleration(model, mid, tau);
    if (!a2.allFinite()) {
        throw NonFiniteState("acceleration overflowed during integration");
    }

    out.state.velocity = state.velocity + dt * a2;
    out.state.pose = oplus(state.pose, mid.velocity, dt);
    return out;
}

}  // namespace auvctrl
