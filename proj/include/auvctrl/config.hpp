#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "auvctrl/sim.hpp"

namespace auvctrl {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void fail_field(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline const json& require_key(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) fail_field(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail_field(join(path, key), "missing required field");
    return *it;
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail_field(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) fail_field(join(path, key), "unknown field");
    }
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail_field(path, "expected a number");
    return v.get<double>();
}

inline int as_int(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d)) return static_cast<int>(d);
    }
    fail_field(path, "expected an integer");
}

inline bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail_field(path, "expected true or false");
    return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail_field(path, "expected a string");
    return v.get<std::string>();
}

inline Eigen::VectorXd as_vector(const json& v, const std::string& path, Eigen::Index size) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
        fail_field(path, "expected an array of " + std::to_string(size) + " numbers");
    }
    Eigen::VectorXd out(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out[i] = as_number(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    }
    return out;
}

inline Eigen::Vector3d as_vector3(const json& v, const std::string& path) {
    return as_vector(v, path, 3);
}

// rows fixed; cols fixed when >= 0, otherwise taken from the first row
inline Eigen::MatrixXd as_matrix(const json& v, const std::string& path, Eigen::Index rows,
                                 Eigen::Index cols) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
        fail_field(path, "expected " + std::to_string(rows) + " rows");
    }
    if (cols < 0) {
        const auto& first = v[0];
        if (!first.is_array() || first.empty()) fail_field(path + "[0]", "expected a row array");
        cols = static_cast<Eigen::Index>(first.size());
    }
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::string row_path = path + "[" + std::to_string(r) + "]";
        out.row(r) = as_vector(v[static_cast<std::size_t>(r)], row_path, cols).transpose();
    }
    return out;
}

inline json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// File loading
// ---------------------------------------------------------------------------

// Parse a JSON file, reporting syntax errors with the line they occur on.
inline json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t limit = std::min(e.byte, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') ++line;
        }
        throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Vehicle parameter files
// ---------------------------------------------------------------------------

inline VehicleModel vehicle_from_json(const json& j, const std::string& path = "vehicle") {
    using namespace detail;
    reject_unknown(j, path,
                   {"mass", "inertia", "cog", "cob", "added_mass", "linear_damping",
                    "quadratic_damping", "buoyancy_force", "tam", "max_thrust", "gravity"});

    RigidBodyParams body;
    body.mass = as_number(require_key(j, path, "mass"), join(path, "mass"));
    body.inertia = as_matrix(require_key(j, path, "inertia"), join(path, "inertia"), 3, 3);
    body.cog = as_vector3(require_key(j, path, "cog"), join(path, "cog"));

    HydroParams hydro;
    hydro.added_mass =
        as_matrix(require_key(j, path, "added_mass"), join(path, "added_mass"), 6, 6);
    hydro.linear_damping =
        as_matrix(require_key(j, path, "linear_damping"), join(path, "linear_damping"), 6, 6);
    hydro.quadratic_damping = as_vector(require_key(j, path, "quadratic_damping"),
                                        join(path, "quadratic_damping"), 6);
    hydro.buoyancy_force =
        as_number(require_key(j, path, "buoyancy_force"), join(path, "buoyancy_force"));
    hydro.cob = as_vector3(require_key(j, path, "cob"), join(path, "cob"));

    ThrusterAllocation thrusters;
    thrusters.tam = as_matrix(require_key(j, path, "tam"), join(path, "tam"), 6, -1);
    thrusters.max_thrust =
        as_number(require_key(j, path, "max_thrust"), join(path, "max_thrust"));

    double gravity = 9.81;
    if (const auto it = j.find("gravity"); it != j.end()) {
        gravity = as_number(*it, join(path, "gravity"));
    }

    try {
        return VehicleModel(body, hydro, thrusters, gravity);
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline json vehicle_to_json(const VehicleModel& m) {
    using detail::matrix_to_json;
    using detail::vector_to_json;
    json j;
    j["mass"] = m.body().mass;
    j["inertia"] = matrix_to_json(m.body().inertia);
    j["cog"] = vector_to_json(m.body().cog);
    j["added_mass"] = matrix_to_json(m.hydro().added_mass);
    j["linear_damping"] = matrix_to_json(m.hydro().linear_damping);
    j["quadratic_damping"] = vector_to_json(m.hydro().quadratic_damping);
    j["buoyancy_force"] = m.hydro().buoyancy_force;
    j["cob"] = vector_to_json(m.hydro().cob);
    j["tam"] = matrix_to_json(m.thrusters().tam);
    j["max_thrust"] = m.thrusters().max_thrust;
    j["gravity"] = m.gravity();
    return j;
}

inline VehicleModel load_vehicle(const std::filesystem::path& path) {
    return vehicle_from_json(load_json_file(path), path.filename().string());
}

// ---------------------------------------------------------------------------
// Run configuration (scenario + controller settings)
// ---------------------------------------------------------------------------

// Grids for the hyperparameter studies; every list can be overridden from
// the scenario file or --set.
struct SweepSettings {
    std::vector<int> k_grid{250, 500, 1000, 2000, 3000};
    std::vector<int> horizon_grid{10, 15, 25, 35, 50};
    std::vector<double> sigma_pct_grid{0.25, 0.5, 1.0, 2.0, 5.0};
    int seeds{5};  // repetitions per grid point
};

/**
 * Everything one experiment run needs: the scenario, the sampling-controller
 * hyperparameters, cost weights, and baseline gains. `resolved` holds the
 * fully merged JSON (defaults <- file <- overrides) for the run manifest.
 */
struct RunConfig {
    Scenario scenario;
    MppiConfig mppi;            // noise_std left empty when specified as a percentage
    double noise_std_pct{1.0};  // of max thrust; used when mppi.noise_std is empty
    CostWeights weights;
    PidGains pid_gains;
    CascadeGains cascade_gains;
    SweepSettings sweep;
    std::optional<std::filesystem::path> vehicle_file;
    json resolved;
};

// Per-thruster sampling scale: explicit array wins, else pct of max thrust.
inline Eigen::VectorXd resolve_noise_std(const RunConfig& cfg, const VehicleModel& model) {
    if (cfg.mppi.noise_std.size() > 0) return cfg.mppi.noise_std;
    return Eigen::VectorXd::Constant(model.thruster_count(),
                                     cfg.noise_std_pct / 100.0 * model.max_thrust());
}

// The built-in configuration: stock vehicle, forward-waypoint scenario, and
// the stock controller settings. Files and --set overrides layer on top.
inline json default_run_json() {
    using detail::vector_to_json;
    json j;
    j["goal"] = {{"position", {10.0, 0.0, 0.0}},
                 {"orientation_rotvec", {0.0, 0.0, 0.0}},
                 {"velocity", {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}};
    j["variant"] = "neutral";
    j["obstacles"] = json::array();
    j["obstacle_margin"] = 1.0;
    j["duration"] = 50.0;
    j["control_dt"] = 0.1;
    j["plant_dt"] = 0.02;
    j["goal_tolerance"] = 0.5;
    j["disturbance"] = nullptr;
    j["initial"] = {{"position", {0.0, 0.0, 0.0}},
                    {"orientation_rotvec", {0.0, 0.0, 0.0}},
                    {"velocity", {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}}};
    j["vehicle_file"] = nullptr;

    j["mppi"] = {{"num_samples", 2000}, {"horizon", 25},     {"noise_std_pct", 1.0},
                 {"noise_std", nullptr}, {"lambda", 0.06},   {"literal_sigma_cost", false},
                 {"filter", nullptr},    {"shift_init", "copy_last"}, {"seed", 0},
                 {"workers", 1}};

    CostWeights w;
    j["cost"] = {{"q", vector_to_json(w.q)}, {"squared", false}};

    const SweepSettings sweep;
    j["sweep"] = {{"k_grid", sweep.k_grid},
                  {"horizon_grid", sweep.horizon_grid},
                  {"sigma_pct_grid", sweep.sigma_pct_grid},
                  {"seeds", sweep.seeds}};

    const PidGains pid = single_pid_gains();
    j["pid"] = {{"kp", vector_to_json(pid.kp)},
                {"ki", vector_to_json(pid.ki)},
                {"kd", vector_to_json(pid.kd)},
                {"integral_limit", vector_to_json(pid.integral_limit)}};

    const CascadeGains cas = cascade_pid_gains();
    j["cascade"] = {{"position",
                     {{"kp", vector_to_json(cas.position.kp)},
                      {"ki", vector_to_json(cas.position.ki)},
                      {"kd", vector_to_json(cas.position.kd)},
                      {"integral_limit", vector_to_json(cas.position.integral_limit)}}},
                    {"velocity",
                     {{"kp", vector_to_json(cas.velocity.kp)},
                      {"ki", vector_to_json(cas.velocity.ki)},
                      {"kd", vector_to_json(cas.velocity.kd)},
                      {"integral_limit", vector_to_json(cas.velocity.integral_limit)}}}};
    return j;
}

// Overlay `patch` onto `base`: objects merge key-by-key (keys must already
// exist in the defaults, so typos fail loudly); anything else replaces.
inline void merge_config(json& base, const json& patch, const std::string& path = "") {
    if (!patch.is_object() || !base.is_object()) {
        base = patch;
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        const std::string sub = detail::join(path, key);
        const auto it = base.find(key);
        if (it == base.end()) detail::fail_field(sub, "unknown field");
        if (it->is_object() && value.is_object()) {
            merge_config(*it, value, sub);
        } else {
            *it = value;
        }
    }
}

/**
 * Apply one `--set dotted.key=value` override. The key must already exist in
 * the configuration; the value is parsed as JSON when possible (numbers,
 * booleans, arrays, null) and taken as a string otherwise.
 */
inline void apply_override(json& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key=value, got: " + spec);
    }
    const std::string key_path = spec.substr(0, eq);
    const std::string value_text = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::parse_error&) {
        value = value_text;  // plain string
    }

    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = key_path.find('.', start);
        const std::string key = key_path.substr(start, dot - start);
        if (!node->is_object() || node->find(key) == node->end()) {
            throw ConfigError("override references unknown key: " + key_path);
        }
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }

    const bool compatible = node->is_null() || value.is_null() ||
                            node->type() == value.type() ||
                            (node->is_number() && value.is_number());
    if (!compatible) {
        throw ConfigError("override type mismatch for " + key_path + ": config holds " +
                          std::string(node->type_name()) + ", override is " +
                          std::string(value.type_name()));
    }
    *node = value;
}

namespace detail {

inline Pose pose_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"position", "orientation_rotvec", "velocity"});
    Pose p;
    p.position = as_vector3(require_key(j, path, "position"), join(path, "position"));
    p.orientation = UnitQuaternion::from_rotation_vector(as_vector3(
        require_key(j, path, "orientation_rotvec"), join(path, "orientation_rotvec")));
    return p;
}

inline PidGains pid_gains_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"kp", "ki", "kd", "integral_limit"});
    PidGains g;
    g.kp = as_vector(require_key(j, path, "kp"), join(path, "kp"), 6);
    g.ki = as_vector(require_key(j, path, "ki"), join(path, "ki"), 6);
    g.kd = as_vector(require_key(j, path, "kd"), join(path, "kd"), 6);
    g.integral_limit =
        as_vector(require_key(j, path, "integral_limit"), join(path, "integral_limit"), 6);
    try {
        validate(g);
    } catch (const std::exception& e) {
        fail_field(path, e.what());
    }
    return g;
}

}  // namespace detail

// Build the typed run configuration from fully merged JSON.
inline RunConfig run_config_from_json(const json& j) {
    using namespace detail;
    RunConfig cfg;
    cfg.resolved = j;

    reject_unknown(j, "", {"goal", "variant", "obstacles", "obstacle_margin", "duration",
                           "control_dt", "plant_dt", "goal_tolerance", "disturbance", "initial",
                           "vehicle_file", "mppi", "cost", "sweep", "pid", "cascade"});

    // scenario
    const json& goal = require_key(j, "", "goal");
    cfg.scenario.goal.pose = pose_from_json(goal, "goal");
    cfg.scenario.goal.velocity = as_vector(require_key(goal, "goal", "velocity"),
                                           "goal.velocity", 6);

    const std::string variant = as_string(require_key(j, "", "variant"), "variant");
    if (variant == "neutral") {
        cfg.scenario.variant = BuoyancyVariant::kNeutral;
    } else if (variant == "negative") {
        cfg.scenario.variant = BuoyancyVariant::kNegative;
    } else if (variant == "positive") {
        cfg.scenario.variant = BuoyancyVariant::kPositive;
    } else {
        fail_field("variant", "must be neutral, negative, or positive, got: " + variant);
    }

    const json& obstacles = require_key(j, "", "obstacles");
    if (!obstacles.is_array()) fail_field("obstacles", "expected an array");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const std::string path = "obstacles[" + std::to_string(i) + "]";
        const json& o = obstacles[i];
        reject_unknown(o, path, {"center", "radius", "half_height"});
        CylinderObstacle obs;
        obs.center = as_vector3(require_key(o, path, "center"), join(path, "center"));
        obs.radius = as_number(require_key(o, path, "radius"), join(path, "radius"));
        obs.half_height =
            as_number(require_key(o, path, "half_height"), join(path, "half_height"));
        cfg.scenario.obstacles.push_back(obs);
    }

    cfg.scenario.obstacle_margin =
        as_number(require_key(j, "", "obstacle_margin"), "obstacle_margin");
    cfg.scenario.duration = as_number(require_key(j, "", "duration"), "duration");
    cfg.scenario.control_dt = as_number(require_key(j, "", "control_dt"), "control_dt");
    cfg.scenario.plant_dt = as_number(require_key(j, "", "plant_dt"), "plant_dt");
    cfg.scenario.goal_tolerance =
        as_number(require_key(j, "", "goal_tolerance"), "goal_tolerance");

    const json& disturbance = require_key(j, "", "disturbance");
    if (!disturbance.is_null()) {
        reject_unknown(disturbance, "disturbance", {"force", "torque"});
        Wrench w;
        w.force = as_vector3(require_key(disturbance, "disturbance", "force"),
                             "disturbance.force");
        w.torque = as_vector3(require_key(disturbance, "disturbance", "torque"),
                              "disturbance.torque");
        cfg.scenario.disturbance = w;
    }

    const json& initial = require_key(j, "", "initial");
    cfg.scenario.initial_state.pose = pose_from_json(initial, "initial");
    cfg.scenario.initial_state.velocity =
        as_vector(require_key(initial, "initial", "velocity"), "initial.velocity", 6);

    const json& vehicle_file = require_key(j, "", "vehicle_file");
    if (!vehicle_file.is_null()) {
        cfg.vehicle_file = std::filesystem::path(as_string(vehicle_file, "vehicle_file"));
    }

    // sampling controller
    const json& mppi = require_key(j, "", "mppi");
    reject_unknown(mppi, "mppi",
                   {"num_samples", "horizon", "noise_std_pct", "noise_std", "lambda",
                    "literal_sigma_cost", "filter", "shift_init", "seed", "workers"});
    cfg.mppi.num_samples = as_int(require_key(mppi, "mppi", "num_samples"), "mppi.num_samples");
    cfg.mppi.horizon = as_int(require_key(mppi, "mppi", "horizon"), "mppi.horizon");
    cfg.mppi.lambda = as_number(require_key(mppi, "mppi", "lambda"), "mppi.lambda");
    cfg.mppi.literal_sigma_cost =
        as_bool(require_key(mppi, "mppi", "literal_sigma_cost"), "mppi.literal_sigma_cost");
    cfg.noise_std_pct =
        as_number(require_key(mppi, "mppi", "noise_std_pct"), "mppi.noise_std_pct");
    if (!(cfg.noise_std_pct > 0.0)) fail_field("mppi.noise_std_pct", "must be positive");

    const json& noise_std = require_key(mppi, "mppi", "noise_std");
    if (!noise_std.is_null()) {
        if (!noise_std.is_array() || noise_std.empty()) {
            fail_field("mppi.noise_std", "expected null or a non-empty array");
        }
        cfg.mppi.noise_std = detail::as_vector(noise_std, "mppi.noise_std",
                                               static_cast<Eigen::Index>(noise_std.size()));
    }

    const json& filter = require_key(mppi, "mppi", "filter");
    if (!filter.is_null()) {
        reject_unknown(filter, "mppi.filter", {"window", "poly_order"});
        MppiConfig::Filter f;
        f.window = as_int(require_key(filter, "mppi.filter", "window"), "mppi.filter.window");
        f.poly_order =
            as_int(require_key(filter, "mppi.filter", "poly_order"), "mppi.filter.poly_order");
        cfg.mppi.filter = f;
    }

    const std::string shift = as_string(require_key(mppi, "mppi", "shift_init"),
                                        "mppi.shift_init");
    if (shift == "copy_last") {
        cfg.mppi.shift_init = MppiConfig::ShiftInit::kCopyLast;
    } else if (shift == "zero") {
        cfg.mppi.shift_init = MppiConfig::ShiftInit::kZero;
    } else {
        fail_field("mppi.shift_init", "must be copy_last or zero, got: " + shift);
    }

    const json& seed = require_key(mppi, "mppi", "seed");
    if (!seed.is_number() || as_number(seed, "mppi.seed") < 0) {
        fail_field("mppi.seed", "expected a non-negative integer");
    }
    cfg.mppi.seed = seed.get<uint64_t>();
    cfg.mppi.workers = as_int(require_key(mppi, "mppi", "workers"), "mppi.workers");

    // cost
    const json& cost = require_key(j, "", "cost");
    reject_unknown(cost, "cost", {"q", "squared"});
    cfg.weights.q = as_vector(require_key(cost, "cost", "q"), "cost.q", 10);
    cfg.weights.squared = as_bool(require_key(cost, "cost", "squared"), "cost.squared");
    if ((cfg.weights.q.array() < 0).any()) fail_field("cost.q", "weights must be non-negative");

    // sweep grids
    const json& sweep = require_key(j, "", "sweep");
    reject_unknown(sweep, "sweep", {"k_grid", "horizon_grid", "sigma_pct_grid", "seeds"});
    const auto int_list = [&](const char* key) {
        const std::string field = std::string("sweep.") + key;
        const json& list = require_key(sweep, "sweep", key);
        if (!list.is_array() || list.empty()) fail_field(field, "expected a non-empty array");
        std::vector<int> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            out.push_back(as_int(list[i], field + "[" + std::to_string(i) + "]"));
            if (out.back() <= 0) fail_field(field, "entries must be positive");
        }
        return out;
    };
    cfg.sweep.k_grid = int_list("k_grid");
    cfg.sweep.horizon_grid = int_list("horizon_grid");
    {
        const json& list = require_key(sweep, "sweep", "sigma_pct_grid");
        if (!list.is_array() || list.empty()) {
            fail_field("sweep.sigma_pct_grid", "expected a non-empty array");
        }
        cfg.sweep.sigma_pct_grid.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string field = "sweep.sigma_pct_grid[" + std::to_string(i) + "]";
            cfg.sweep.sigma_pct_grid.push_back(as_number(list[i], field));
            if (cfg.sweep.sigma_pct_grid.back() <= 0.0) fail_field(field, "must be positive");
        }
    }
    cfg.sweep.seeds = as_int(require_key(sweep, "sweep", "seeds"), "sweep.seeds");
    if (cfg.sweep.seeds <= 0) fail_field("sweep.seeds", "must be positive");

    // baselines
    cfg.pid_gains = pid_gains_from_json(require_key(j, "", "pid"), "pid");
    const json& cascade = require_key(j, "", "cascade");
    reject_unknown(cascade, "cascade", {"position", "velocity"});
    cfg.cascade_gains.position =
        pid_gains_from_json(require_key(cascade, "cascade", "position"), "cascade.position");
    cfg.cascade_gains.velocity =
        pid_gains_from_json(require_key(cascade, "cascade", "velocity"), "cascade.velocity");

    try {
        validate(cfg.scenario);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return cfg;
}

/**
 * Load a run configuration: built-in defaults, overlaid with the scenario
 * file (when given), overlaid with --set overrides. A vehicle_file entry is
 * resolved relative to the scenario file's directory.
 */
inline RunConfig load_run_config(const std::optional<std::filesystem::path>& scenario_file,
                                 const std::vector<std::string>& overrides = {}) {
    json resolved = default_run_json();
    if (scenario_file) {
        const json overlay = load_json_file(*scenario_file);
        try {
            merge_config(resolved, overlay);
        } catch (const ConfigError& e) {
            throw ConfigError(scenario_file->string() + ": " + e.what());
        }
    }
    for (const auto& spec : overrides) apply_override(resolved, spec);

    RunConfig cfg = run_config_from_json(resolved);
    if (cfg.vehicle_file && scenario_file && cfg.vehicle_file->is_relative()) {
        cfg.vehicle_file = scenario_file->parent_path() / *cfg.vehicle_file;
    }
    return cfg;
}

// The vehicle a run configuration asks for: its file if set, stock otherwise.
inline VehicleModel load_run_vehicle(const RunConfig& cfg) {
    return cfg.vehicle_file ? load_vehicle(*cfg.vehicle_file) : reference_vehicle();
}

}  // namespace auvctrl
