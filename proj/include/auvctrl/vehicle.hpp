#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "auvctrl/common.hpp"

namespace auvctrl {

// Thrown when the total mass matrix (rigid-body plus added mass) is not
// usably invertible (condition number >= 1e8).
struct SingularMass : std::runtime_error {
    explicit SingularMass(const std::string& what) : std::runtime_error(what) {}
};

/**
 * Rigid-body parameters. The inertia tensor is taken about the body-frame
 * origin, not the center of gravity.
 */
struct RigidBodyParams {
    double mass{0.0};                              // [kg]
    Eigen::Matrix3d inertia{Eigen::Matrix3d::Zero()};  // [kg m^2]
    Eigen::Vector3d cog{Eigen::Vector3d::Zero()};  // [m] center of gravity
};

/**
 * Hydrodynamic parameters: added mass, damping, and buoyancy.
 *
 * Damping is a full 6x6 linear matrix plus a diagonal quadratic term
 * diag(d_i * |nu_i|). Buoyancy acts at the center of buoyancy; the world
 * frame is ENU (z up), so positive buoyancy_force pushes toward +z.
 */
struct HydroParams {
    Matrix6d added_mass{Matrix6d::Zero()};         // [kg, kg m^2]
    Matrix6d linear_damping{Matrix6d::Zero()};     // [N s/m, ...]
    Vector6d quadratic_damping{Vector6d::Zero()};  // diagonal coefficients
    double buoyancy_force{0.0};                    // [N]
    Eigen::Vector3d cob{Eigen::Vector3d::Zero()};  // [m] center of buoyancy
};

/**
 * Maps n >= 6 per-thruster forces [N] to a body wrench through a rank-6
 * allocation matrix. Commands are saturated to +-max_thrust.
 */
struct ThrusterAllocation {
    Eigen::Matrix<double, 6, Eigen::Dynamic> tam;
    double max_thrust{0.0};  // [N] per thruster

    Eigen::Index count() const { return tam.cols(); }
};

/**
 * Body-frame force/torque pair. Stored as two 3-vectors for clarity at call
 * sites; vector() flattens to the 6-DOF ordering (surge, sway, heave, roll,
 * pitch, yaw).
 */
struct Wrench {
    Eigen::Vector3d force{Eigen::Vector3d::Zero()};   // [N]
    Eigen::Vector3d torque{Eigen::Vector3d::Zero()};  // [N m]

    Vector6d vector() const {
        Vector6d v;
        v.head<3>() = force;
        v.tail<3>() = torque;
        return v;
    }

    static Wrench from_vector(const Vector6d& v) {
        Wrench w;
        w.force = v.head<3>();
        w.torque = v.tail<3>();
        return w;
    }
};

namespace detail {

inline void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

inline bool symmetric_within(const Eigen::MatrixXd& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

}  // namespace detail

/**
 * Immutable vehicle description with the derived quantities the dynamics
 * hot path needs precomputed: total mass matrix and its inverse, weight,
 * and the allocation pseudo-inverse.
 *
 * Construction validates all parameter invariants; instances are safe to
 * share across any number of rollout workers.
 */
class VehicleModel {
  public:
    VehicleModel(RigidBodyParams body, HydroParams hydro, ThrusterAllocation thrusters,
                 double gravity = 9.81)
        : body_(std::move(body)),
          hydro_(std::move(hydro)),
          thrusters_(std::move(thrusters)),
          gravity_(gravity) {
        validate();

        m_rb_.setZero();
        m_rb_.topLeftCorner<3, 3>() = body_.mass * Eigen::Matrix3d::Identity();
        m_rb_.topRightCorner<3, 3>() = -body_.mass * skew(body_.cog);
        m_rb_.bottomLeftCorner<3, 3>() = body_.mass * skew(body_.cog);
        m_rb_.bottomRightCorner<3, 3>() = body_.inertia;

        m_tot_ = m_rb_ + hydro_.added_mass;
        // Symmetrize before factoring: both inputs are symmetric by
        // invariant, this just cancels representation noise.
        m_tot_ = (0.5 * (m_tot_ + m_tot_.transpose())).eval();

        Eigen::SelfAdjointEigenSolver<Matrix6d> es(m_tot_);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo >= 1e8) {
            throw SingularMass("total mass matrix not invertible (condition number >= 1e8)");
        }
        m_inv_ = m_tot_.inverse();

        weight_ = body_.mass * gravity_;
        tam_pinv_ = thrusters_.tam.completeOrthogonalDecomposition().pseudoInverse();
    }

    const RigidBodyParams& body() const { return body_; }
    const HydroParams& hydro() const { return hydro_; }
    const ThrusterAllocation& thrusters() const { return thrusters_; }
    double gravity() const { return gravity_; }
    double weight() const { return weight_; }  // m*g [N]

    const Matrix6d& rigid_body_mass() const { return m_rb_; }
    const Matrix6d& total_mass() const { return m_tot_; }
    const Matrix6d& total_mass_inverse() const { return m_inv_; }

    Eigen::Index thruster_count() const { return thrusters_.count(); }
    double max_thrust() const { return thrusters_.max_thrust; }

    // Least-squares thruster commands realizing a desired body wrench
    // (before saturation).
    const Eigen::MatrixXd& allocation_pinv() const { return tam_pinv_; }

  private:
    void validate() const {
        using detail::require;
        require(std::isfinite(body_.mass) && body_.mass > 0.0, "mass must be > 0");
        require(body_.inertia.allFinite(), "inertia must be finite");
        require(detail::symmetric_within(body_.inertia, 1e-9), "inertia must be symmetric");
        {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(body_.inertia);
            require(es.eigenvalues().minCoeff() > 0.0, "inertia must be positive definite");
        }
        require(body_.cog.allFinite(), "cog must be finite");

        require(hydro_.added_mass.allFinite(), "added_mass must be finite");
        require(detail::symmetric_within(hydro_.added_mass, 1e-9),
                "added_mass must be symmetric");
        {
            Eigen::SelfAdjointEigenSolver<Matrix6d> es(hydro_.added_mass);
            require(es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + es.eigenvalues().maxCoeff()),
                    "added_mass must be positive semidefinite");
        }
        require(hydro_.linear_damping.allFinite(), "linear_damping must be finite");
        {
            // Dissipativity needs only the symmetric part to be PSD.
            const Matrix6d sym = 0.5 * (hydro_.linear_damping + hydro_.linear_damping.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix6d> es(sym);
            require(es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + es.eigenvalues().maxCoeff()),
                    "linear_damping must have positive semidefinite symmetric part");
        }
        require(hydro_.quadratic_damping.allFinite() &&
                    (hydro_.quadratic_damping.array() >= 0.0).all(),
                "quadratic_damping coefficients must be >= 0");
        require(std::isfinite(hydro_.buoyancy_force) && hydro_.buoyancy_force >= 0.0,
                "buoyancy_force must be >= 0");
        require(hydro_.cob.allFinite(), "cob must be finite");

        require(thrusters_.tam.allFinite(), "tam must be finite");
        require(thrusters_.count() >= 6, "tam must have at least 6 thrusters");
        {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(thrusters_.tam);
            require(qr.rank() == 6, "tam must have rank 6 (fully actuated)");
        }
        require(std::isfinite(thrusters_.max_thrust) && thrusters_.max_thrust > 0.0,
                "max_thrust must be > 0");
        require(std::isfinite(gravity_) && gravity_ > 0.0, "gravity must be > 0");
    }

    RigidBodyParams body_;
    HydroParams hydro_;
    ThrusterAllocation thrusters_;
    double gravity_;

    Matrix6d m_rb_;
    Matrix6d m_tot_;
    Matrix6d m_inv_;
    Eigen::MatrixXd tam_pinv_;
    double weight_;
};

/**
 * Vectored 8-thruster layout: four horizontal thrusters at 45 degrees on the
 * corners (surge/sway/yaw) and four verticals (heave/roll/pitch). Rank 6.
 */
inline ThrusterAllocation vectored_eight_thruster_layout(double max_thrust) {
    const double c = std::sqrt(0.5);
    // position, direction (unit) per thruster
    const Eigen::Vector3d pos[8] = {
        {1.0, 0.75, 0.0},  {1.0, -0.75, 0.0}, {-1.0, 0.75, 0.0}, {-1.0, -0.75, 0.0},
        {0.8, 0.6, 0.0},   {0.8, -0.6, 0.0},  {-0.8, 0.6, 0.0},  {-0.8, -0.6, 0.0}};
    const Eigen::Vector3d dir[8] = {
        {c, -c, 0.0}, {c, c, 0.0}, {c, c, 0.0}, {c, -c, 0.0},
        {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};

    ThrusterAllocation alloc;
    alloc.tam.resize(6, 8);
    for (int i = 0; i < 8; ++i) {
        alloc.tam.col(i).head<3>() = dir[i];
        alloc.tam.col(i).tail<3>() = pos[i].cross(dir[i]);
    }
    alloc.max_thrust = max_thrust;
    return alloc;
}

/**
 * Documented default vehicle: a fully actuated, neutrally buoyant work-class
 * ROV of about 1800 kg with diagonal added mass and damping. These numbers
 * are also shipped as config/vehicle_default.json; a test keeps the two in
 * sync.
 *
 * The 1 kN per-thruster rating matters beyond saturation: the controller's
 * default sampling noise is 1% of it (10 N), which sets the closed loop's
 * working pace. At that scale transit to a waypoint 10 m away takes roughly
 * two minutes; noise past ~1.2% collapses the sampler's weights onto single
 * samples and the commanded attitude starts to wander.
 */
inline VehicleModel reference_vehicle() {
    RigidBodyParams body;
    body.mass = 1800.0;
    body.inertia = Eigen::Vector3d(530.0, 800.0, 700.0).asDiagonal();
    body.cog = Eigen::Vector3d::Zero();

    HydroParams hydro;
    Vector6d ma;
    ma << 780.0, 1220.0, 3660.0, 535.0, 843.0, 224.0;
    hydro.added_mass = ma.asDiagonal();
    Vector6d dl;
    dl << 75.0, 70.0, 730.0, 270.0, 310.0, 105.0;
    hydro.linear_damping = dl.asDiagonal();
    hydro.quadratic_damping << 748.0, 992.0, 1821.0, 672.0, 774.0, 523.0;
    hydro.buoyancy_force = body.mass * 9.81;  // neutral
    hydro.cob = Eigen::Vector3d(0.0, 0.0, 0.3);

    return VehicleModel(body, hydro, vectored_eight_thruster_layout(1000.0));
}

}  // namespace auvctrl
