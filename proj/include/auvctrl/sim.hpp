#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "auvctrl/mppi.hpp"
#include "auvctrl/pid.hpp"

namespace auvctrl {

// ---------------------------------------------------------------------------
// Plant variants
// ---------------------------------------------------------------------------

// Buoyancy conditions for the adaptation study. The controller always keeps
// the nominal (neutral) model; only the plant changes.
enum class BuoyancyVariant {
    kNeutral,   // weight == buoyancy
    kNegative,  // 100 kg of extra mass: vehicle sinks when passive
    kPositive,  // buoyancy raised so the net upward force at level is 250 N
};

inline const char* to_string(BuoyancyVariant v) {
    switch (v) {
        case BuoyancyVariant::kNeutral: return "neutral";
        case BuoyancyVariant::kNegative: return "negative";
        case BuoyancyVariant::kPositive: return "positive";
    }
    return "unknown";
}

/**
 * Produce the plant model for a buoyancy variant. Neutral returns the input
 * unchanged. Negative adds 100 kg of rigid-body mass (mass matrix and weight
 * both grow; buoyancy stays), leaving a net 100*g downward force at level
 * attitude. Positive raises the buoyancy force to weight + 250 N.
 */
inline VehicleModel apply_variant(const VehicleModel& base, BuoyancyVariant variant) {
    switch (variant) {
        case BuoyancyVariant::kNeutral: return base;
        case BuoyancyVariant::kNegative: {
            RigidBodyParams body = base.body();
            body.mass += 100.0;
            return VehicleModel(body, base.hydro(), base.thrusters(), base.gravity());
        }
        case BuoyancyVariant::kPositive: {
            HydroParams hydro = base.hydro();
            hydro.buoyancy_force = base.weight() + 250.0;
            return VehicleModel(base.body(), hydro, base.thrusters(), base.gravity());
        }
    }
    throw ConfigError("apply_variant: unknown buoyancy variant");
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/**
 * A closed-loop episode: start state, waypoint goal, plant condition, and
 * timing. The plant integrates at plant_dt while the controller runs at
 * control_dt (zero-order hold in between), so control_dt must be an integer
 * multiple of plant_dt.
 */
struct Scenario {
    GoalSpec goal;
    BuoyancyVariant variant{BuoyancyVariant::kNeutral};
    std::vector<CylinderObstacle> obstacles;
    double obstacle_margin{1.0};  // clearance used for planning AND scoring
    double duration{50.0};        // seconds
    double control_dt{0.1};       // seconds per controller decision
    double plant_dt{0.02};        // seconds per integrator substep
    std::optional<Wrench> disturbance;  // constant exterior wrench on the plant
    VehicleState initial_state{};
    double goal_tolerance{0.5};  // position norm that counts as "reached"
};

inline int substeps_per_control(const Scenario& s) {
    const double ratio = s.control_dt / s.plant_dt;
    return static_cast<int>(std::lround(ratio));
}

inline void validate(const Scenario& s) {
    if (!(s.duration > 0.0)) throw ConfigError("scenario: duration must be positive");
    if (!(s.plant_dt > 0.0)) throw ConfigError("scenario: plant_dt must be positive");
    if (!(s.control_dt > 0.0)) throw ConfigError("scenario: control_dt must be positive");
    if (s.plant_dt > s.control_dt) {
        throw ConfigError("scenario: plant_dt must not exceed control_dt");
    }
    if (s.plant_dt > 0.2) throw ConfigError("scenario: plant_dt must be at most 0.2");
    const double ratio = s.control_dt / s.plant_dt;
    if (std::abs(ratio - std::lround(ratio)) > 1e-6) {
        throw ConfigError("scenario: control_dt must be an integer multiple of plant_dt");
    }
    if (!(s.obstacle_margin >= 0.0)) {
        throw ConfigError("scenario: obstacle_margin must be non-negative");
    }
    if (!(s.goal_tolerance > 0.0)) {
        throw ConfigError("scenario: goal_tolerance must be positive");
    }
    if (!s.initial_state.finite()) {
        throw ConfigError("scenario: initial state must be finite");
    }
    for (const auto& obs : s.obstacles) {
        if (!(obs.radius > 0.0) || !(obs.half_height > 0.0)) {
            throw ConfigError("scenario: obstacle dimensions must be positive");
        }
    }
}

// Planner cost consistent with a scenario: same goal, same obstacles, same
// clearance margin that metrics later score against.
inline WaypointCost make_waypoint_cost(const Scenario& scenario,
                                       const CostWeights& weights = CostWeights{}) {
    return WaypointCost{scenario.goal, weights, scenario.obstacles, scenario.obstacle_margin};
}

// ---------------------------------------------------------------------------
// Controllers under test
// ---------------------------------------------------------------------------

/**
 * Minimal interface the episode runner drives: one thruster-command vector
 * per control period. Implementations own whatever internal state they need;
 * reset() must return them to their initial condition.
 */
class Controller {
  public:
    virtual ~Controller() = default;
    virtual Eigen::VectorXd command(const VehicleState& x) = 0;
    virtual void reset() {}
    // Sampling statistics for controllers that have them; empty otherwise.
    virtual std::optional<StepDiagnostics> last_diagnostics() const { return std::nullopt; }
    virtual std::string name() const = 0;
};

// Sampling-based waypoint controller wrapped for the episode runner.
class MppiWaypointController final : public Controller {
  public:
    MppiWaypointController(const VehicleModel& model, const MppiConfig& config,
                           const WaypointCost& cost, double control_dt)
        : inner_(model, config, cost, control_dt) {}

    Eigen::VectorXd command(const VehicleState& x) override {
        auto out = inner_.control_step(x);
        last_ = out.diagnostics;
        return std::move(out.command);
    }

    void reset() override {
        inner_.reset();
        last_.reset();
    }

    std::optional<StepDiagnostics> last_diagnostics() const override { return last_; }
    std::string name() const override { return "mppi"; }
    const MppiController<WaypointCost>& inner() const { return inner_; }

  private:
    MppiController<WaypointCost> inner_;
    std::optional<StepDiagnostics> last_;
};

// Full-state PID wrapped for the episode runner; the wrench it produces is
// distributed to thrusters through the allocation pseudo-inverse.
class SinglePidController final : public Controller {
  public:
    SinglePidController(const VehicleModel& model, const GoalSpec& goal, double control_dt,
                        const PidGains& gains = single_pid_gains())
        : model_(model), goal_(goal), dt_(control_dt), pid_(gains) {
        if (!(control_dt > 0.0)) throw ConfigError("pid controller: control_dt must be positive");
    }

    Eigen::VectorXd command(const VehicleState& x) override {
        return wrench_to_thrusts(model_, pid_.step(x, goal_, dt_));
    }

    void reset() override { pid_.reset(); }
    std::string name() const override { return "pid"; }
    const VehicleModel& model() const { return model_; }

  private:
    VehicleModel model_;
    GoalSpec goal_;
    double dt_;
    SinglePid pid_;
};

// Position/velocity cascade wrapped for the episode runner.
class CascadePidController final : public Controller {
  public:
    CascadePidController(const VehicleModel& model, const GoalSpec& goal, double control_dt,
                         const CascadeGains& gains = cascade_pid_gains())
        : model_(model), goal_(goal), dt_(control_dt), pid_(gains) {
        if (!(control_dt > 0.0)) throw ConfigError("pid controller: control_dt must be positive");
    }

    Eigen::VectorXd command(const VehicleState& x) override {
        return wrench_to_thrusts(model_, pid_.step(x, goal_, dt_));
    }

    void reset() override { pid_.reset(); }
    std::string name() const override { return "cascade"; }
    const VehicleModel& model() const { return model_; }

  private:
    VehicleModel model_;
    GoalSpec goal_;
    double dt_;
    CascadePid pid_;
};

// ---------------------------------------------------------------------------
// Episode runner
// ---------------------------------------------------------------------------

struct LogRow {
    double time{0.0};            // start of the control period
    VehicleState state;          // state the controller saw
    Eigen::VectorXd thrusts;     // commands held over the period
    double wall_ms{0.0};         // controller decision time
    std::optional<StepDiagnostics> diagnostics;
};

struct TrajectoryLog {
    std::vector<LogRow> rows;
    VehicleState final_state;  // state after the last control period
    bool diverged{false};
    double diverged_time{0.0};
};

// The plant left the finite range mid-episode. Carries the partial log so
// callers can still write out what happened before the blowup.
class PlantDiverged : public std::runtime_error {
  public:
    PlantDiverged(TrajectoryLog log, double time)
        : std::runtime_error("plant state diverged at t = " + std::to_string(time) + " s"),
          log_(std::move(log)),
          time_(time) {}

    const TrajectoryLog& log() const { return log_; }
    double time() const { return time_; }

  private:
    TrajectoryLog log_;
    double time_;
};

/**
 * Run one closed-loop episode. The controller is reset, then queried once per
 * control period; its commands are held while the plant (the base model with
 * the scenario's buoyancy variant applied) integrates at plant_dt. One log
 * row is recorded per control period. A non-finite plant state raises
 * PlantDiverged carrying the partial log.
 */
inline TrajectoryLog run_episode(Controller& controller, const Scenario& scenario,
                                 const VehicleModel& base_plant) {
    validate(scenario);
    const VehicleModel plant = apply_variant(base_plant, scenario.variant);
    const Wrench tau_ext = scenario.disturbance.value_or(Wrench{});
    const int substeps = substeps_per_control(scenario);
    const int n_steps = static_cast<int>(std::floor(scenario.duration / scenario.control_dt + 1e-9));

    controller.reset();

    TrajectoryLog log;
    log.rows.reserve(static_cast<std::size_t>(n_steps));
    VehicleState x = scenario.initial_state;

    for (int k = 0; k < n_steps; ++k) {
        LogRow row;
        row.time = k * scenario.control_dt;
        row.state = x;

        const auto t0 = std::chrono::steady_clock::now();
        row.thrusts = controller.command(x);
        const auto t1 = std::chrono::steady_clock::now();
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        row.diagnostics = controller.last_diagnostics();

        for (int s = 0; s < substeps; ++s) {
            try {
                x = step(plant, x, row.thrusts, tau_ext, scenario.plant_dt).state;
            } catch (const NonFiniteState&) {
                const double t = row.time + (s + 1) * scenario.plant_dt;
                log.rows.push_back(std::move(row));
                log.diverged = true;
                log.diverged_time = t;
                log.final_state = x;
                throw PlantDiverged(std::move(log), t);
            }
        }
        log.rows.push_back(std::move(row));
    }
    log.final_state = x;
    return log;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

class EmptyLog : public std::runtime_error {
  public:
    EmptyLog() : std::runtime_error("cannot compute metrics of an empty log") {}
};

/**
 * Episode quality summary. Errors are measured against the scenario goal:
 * steady-state values average the final 10% of log rows; overshoot and
 * settling are evaluated on the approach axis (the world axis with the
 * largest initial error). Settling uses the classic 2%-of-step criterion,
 * reporting the episode duration when the error never stays inside the band.
 */
struct Metrics {
    Eigen::Vector3d ss_error_pos{Eigen::Vector3d::Zero()};  // mean |e| per axis
    double ss_error_angle{0.0};                             // mean orientation error [rad]
    Eigen::Vector3d max_abs_error_pos{Eigen::Vector3d::Zero()};
    int approach_axis{0};
    double overshoot_pct{0.0};
    double settling_time{0.0};
    int collision_count{0};
    bool goal_reached{false};
    double thrust_mean_abs_diff{0.0};  // command jitter between periods
    double mean_wall_ms{0.0};
    double max_wall_ms{0.0};
};

inline Metrics compute_metrics(const TrajectoryLog& log, const Scenario& scenario) {
    if (log.rows.empty()) throw EmptyLog();

    const std::size_t n = log.rows.size();
    const std::size_t ss_begin = n - std::max<std::size_t>(1, n / 10);
    const Eigen::Vector3d goal_p = scenario.goal.pose.position;

    Metrics m;

    // steady-state window
    for (std::size_t i = ss_begin; i < n; ++i) {
        const auto& st = log.rows[i].state;
        m.ss_error_pos += (st.pose.position - goal_p).cwiseAbs();
        m.ss_error_angle += quat_angle_error(st.pose.orientation, scenario.goal.pose.orientation);
    }
    const double ss_count = static_cast<double>(n - ss_begin);
    m.ss_error_pos /= ss_count;
    m.ss_error_angle /= ss_count;

    // whole-episode excursions and collisions
    for (const auto& row : log.rows) {
        m.max_abs_error_pos =
            m.max_abs_error_pos.cwiseMax((row.state.pose.position - goal_p).cwiseAbs());
        if (check_collision(row.state, scenario.obstacles, scenario.obstacle_margin)) {
            ++m.collision_count;  // at most one collision counted per row
        }
    }

    // approach axis: largest initial error component
    const Eigen::Vector3d e0 = goal_p - log.rows.front().state.pose.position;
    int axis = 0;
    e0.cwiseAbs().maxCoeff(&axis);
    m.approach_axis = axis;
    const double step_size = std::abs(e0[axis]);

    if (step_size < 1e-9) {
        m.overshoot_pct = 0.0;
        m.settling_time = 0.0;
    } else {
        const double direction = e0[axis] > 0 ? 1.0 : -1.0;
        double beyond = 0.0;
        for (const auto& row : log.rows) {
            beyond = std::max(beyond, direction * (row.state.pose.position[axis] - goal_p[axis]));
        }
        m.overshoot_pct = 100.0 * beyond / step_size;

        const double band = 0.02 * step_size;
        m.settling_time = scenario.duration;
        for (std::size_t i = 0; i < n; ++i) {
            bool stays = true;
            for (std::size_t j = i; j < n; ++j) {
                if (std::abs(log.rows[j].state.pose.position[axis] - goal_p[axis]) >= band) {
                    stays = false;
                    break;
                }
            }
            if (stays) {
                m.settling_time = log.rows[i].time;
                break;
            }
        }
    }

    // command jitter
    double jitter = 0.0;
    if (n > 1 && log.rows[0].thrusts.size() > 0) {
        for (std::size_t i = 1; i < n; ++i) {
            jitter += (log.rows[i].thrusts - log.rows[i - 1].thrusts).cwiseAbs().mean();
        }
        jitter /= static_cast<double>(n - 1);
    }
    m.thrust_mean_abs_diff = jitter;

    for (const auto& row : log.rows) {
        m.mean_wall_ms += row.wall_ms;
        m.max_wall_ms = std::max(m.max_wall_ms, row.wall_ms);
    }
    m.mean_wall_ms /= static_cast<double>(n);

    m.goal_reached =
        m.collision_count == 0 && m.ss_error_pos.norm() < scenario.goal_tolerance;
    return m;
}

// ---------------------------------------------------------------------------
// CSV / table emission
// ---------------------------------------------------------------------------

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << std::setprecision(17);
    return out;
}

}  // namespace detail

// One row per control period: time, the 13 state scalars (position, unit
// quaternion, body velocity), then the commanded thrusts.
inline void write_trajectory_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    const Eigen::Index n_thrusters = log.rows.empty() ? 0 : log.rows.front().thrusts.size();
    out << "time,px,py,pz,qw,qx,qy,qz,u,v,w,p,q,r";
    for (Eigen::Index i = 0; i < n_thrusters; ++i) out << ",thrust_" << i;
    out << "\n";
    for (const auto& row : log.rows) {
        const auto& st = row.state;
        out << row.time << ',' << st.pose.position.x() << ',' << st.pose.position.y() << ','
            << st.pose.position.z() << ',' << st.pose.orientation.w() << ','
            << st.pose.orientation.x() << ',' << st.pose.orientation.y() << ','
            << st.pose.orientation.z();
        for (int i = 0; i < 6; ++i) out << ',' << st.velocity[i];
        for (Eigen::Index i = 0; i < row.thrusts.size(); ++i) out << ',' << row.thrusts[i];
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

// Sampling statistics per control step, for controllers that report them.
inline void write_diagnostics_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "step,wall_time_ms,beta,eta,eta_over_K,min_cost,mean_cost,rejected_fraction\n";
    for (const auto& row : log.rows) {
        if (!row.diagnostics) continue;
        const auto& d = *row.diagnostics;
        out << d.step << ',' << d.wall_ms << ',' << d.beta << ',' << d.eta << ','
            << d.eta_over_k << ',' << d.min_cost << ',' << d.mean_cost << ','
            << d.rejected_fraction << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<std::pair<std::string, double>> metrics_items(const Metrics& m) {
    return {
        {"ss_error_x", m.ss_error_pos.x()},
        {"ss_error_y", m.ss_error_pos.y()},
        {"ss_error_z", m.ss_error_pos.z()},
        {"ss_error_angle", m.ss_error_angle},
        {"max_abs_error_x", m.max_abs_error_pos.x()},
        {"max_abs_error_y", m.max_abs_error_pos.y()},
        {"max_abs_error_z", m.max_abs_error_pos.z()},
        {"approach_axis", static_cast<double>(m.approach_axis)},
        {"overshoot_pct", m.overshoot_pct},
        {"settling_time_s", m.settling_time},
        {"collision_count", static_cast<double>(m.collision_count)},
        {"goal_reached", m.goal_reached ? 1.0 : 0.0},
        {"thrust_mean_abs_diff", m.thrust_mean_abs_diff},
        {"mean_wall_ms", m.mean_wall_ms},
        {"max_wall_ms", m.max_wall_ms},
    };
}

// Flat key,value summary.
inline void write_metrics_csv(const Metrics& m, const std::filesystem::path& path) {
    auto out = detail::open_for_write(path);
    out << "metric,value\n";
    for (const auto& [key, value] : metrics_items(m)) out << key << ',' << value << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

// Human-readable aligned table of the same summary.
inline std::string format_metrics(const Metrics& m) {
    std::ostringstream out;
    out << std::setprecision(6);
    for (const auto& [key, value] : metrics_items(m)) {
        out << std::left << std::setw(24) << key << std::right << std::setw(14) << value << "\n";
    }
    return out.str();
}

}  // namespace auvctrl
