#pragma once

// Experiment driver: hyperparameter sweeps, smoothing and timing studies,
// baseline comparisons, and the obstacle course. Every experiment writes a
// self-contained output directory — manifest, per-run trajectory CSVs, one
// metrics row per episode, and a ranked summary — plus plot-ready series
// extraction for gnuplot-style consumption. All files are written through a
// temp-and-rename step so an interrupted run never leaves a torn file, and
// finished episodes are flushed to disk as they complete.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <auvctrl/config.hpp>
#include <auvctrl/sim.hpp>

namespace auvctrl {

// Raised by the plot extractor when an input it needs does not exist.
class MissingData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// The experiment kinds the command line accepts.
inline const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {
        "single-run",   "sweep-K", "sweep-horizon", "sweep-sigma",
        "filter-study", "timing",  "pid-compare",   "obstacle-course"};
    return kinds;
}

// One experiment invocation as requested on the command line.
struct ExperimentSpec {
    std::string kind;
    std::optional<std::filesystem::path> scenario_file;  // built-in defaults when absent
    std::vector<std::string> overrides;                  // --set dotted.path=value
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // replaces mppi.seed as the base seed
};

// One finished episode, i.e. one row of metrics.csv.
struct EpisodeOutcome {
    std::string tag;         // run directory name under <out>/runs/
    std::string controller;  // "mppi" | "pid" | "cascade"
    std::string variant;     // buoyancy variant of the plant
    std::string param_name;  // swept parameter, empty when nothing is swept
    double param_value{0.0};
    std::uint64_t seed{0};
    bool diverged{false};
    Metrics metrics;  // zeros when the episode produced no rows
};

struct ExperimentResult {
    std::vector<EpisodeOutcome> outcomes;
    std::filesystem::path out_dir;
    bool any_diverged{false};
};

namespace detail {

// Run `write` against a temporary sibling and rename it into place, so
// readers never observe a half-written file and interrupts leave either the
// previous version or nothing.
template <typename WriteFn>
void write_atomic(const std::filesystem::path& path, WriteFn&& write) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    try {
        write(tmp);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string format_value(double v) {
    std::ostringstream out;
    out << v;  // default format trims trailing zeros: 0.25, 1, 2000
    return out.str();
}

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Minimal CSV reader for the files this library writes (no quoting, no
// embedded separators). Returns all rows including the header.
inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingData("missing input file: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

inline std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                                const std::filesystem::path& path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw MissingData(path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

inline double to_double(const std::string& text, const std::filesystem::path& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw MissingData(path.string() + ": expected a number, got '" + text + "'");
    }
}

inline double yaw_of(double qw, double qx, double qy, double qz) {
    return std::atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz));
}

inline double wrap_angle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment planning
// ---------------------------------------------------------------------------

// One episode to run: which controller, which plant variant, which sampler
// settings, and how it is labelled in the outputs.
struct EpisodeJob {
    std::string tag;
    std::string controller;  // "mppi" | "pid" | "cascade"
    BuoyancyVariant variant{BuoyancyVariant::kNeutral};
    MppiConfig mppi;  // fully resolved (noise_std populated); unused for PID jobs
    std::string param_name;
    double param_value{0.0};
};

/**
 * Expand an experiment kind into its episode list. Grids and the number of
 * repetitions come from the `sweep` section of the configuration; the base
 * seed comes from `mppi.seed` and repetition r runs with seed base + r.
 *
 * `pid-compare` and `obstacle-course` iterate over all three buoyancy
 * variants regardless of the scenario's `variant` field, since comparing
 * across plants is their purpose. PID controllers are deterministic, so
 * they run once per configuration rather than once per seed.
 */
inline std::vector<EpisodeJob> plan_experiment(const std::string& kind, const RunConfig& cfg,
                                               const VehicleModel& vehicle) {
    MppiConfig base = cfg.mppi;
    base.noise_std = resolve_noise_std(cfg, vehicle);

    const int reps = cfg.sweep.seeds;
    const std::uint64_t base_seed = cfg.mppi.seed;
    std::vector<EpisodeJob> jobs;

    const auto push_mppi = [&](std::string tag, const MppiConfig& mppi, BuoyancyVariant variant,
                               std::string param, double value) {
        jobs.push_back({std::move(tag), "mppi", variant, mppi, std::move(param), value});
    };

    if (kind == "single-run") {
        push_mppi("run_s" + std::to_string(base_seed), base, cfg.scenario.variant, "", 0.0);
    } else if (kind == "timing") {
        push_mppi("timing_s" + std::to_string(base_seed), base, cfg.scenario.variant, "", 0.0);
    } else if (kind == "sweep-K") {
        for (int k : cfg.sweep.k_grid) {
            for (int r = 0; r < reps; ++r) {
                MppiConfig m = base;
                m.num_samples = k;
                m.seed = base_seed + static_cast<std::uint64_t>(r);
                push_mppi("K" + std::to_string(k) + "_s" + std::to_string(m.seed), m,
                          cfg.scenario.variant, "K", static_cast<double>(k));
            }
        }
    } else if (kind == "sweep-horizon") {
        for (int h : cfg.sweep.horizon_grid) {
            for (int r = 0; r < reps; ++r) {
                MppiConfig m = base;
                m.horizon = h;
                m.seed = base_seed + static_cast<std::uint64_t>(r);
                push_mppi("tau" + std::to_string(h) + "_s" + std::to_string(m.seed), m,
                          cfg.scenario.variant, "horizon", static_cast<double>(h));
            }
        }
    } else if (kind == "sweep-sigma") {
        for (double pct : cfg.sweep.sigma_pct_grid) {
            for (int r = 0; r < reps; ++r) {
                MppiConfig m = base;
                m.noise_std = Eigen::VectorXd::Constant(vehicle.thruster_count(),
                                                        pct / 100.0 * vehicle.max_thrust());
                m.seed = base_seed + static_cast<std::uint64_t>(r);
                push_mppi("sigma" + detail::format_value(pct) + "_s" + std::to_string(m.seed), m,
                          cfg.scenario.variant, "sigma_pct", pct);
            }
        }
    } else if (kind == "filter-study") {
        const MppiConfig::Filter filter = cfg.mppi.filter.value_or(MppiConfig::Filter{});
        for (int r = 0; r < reps; ++r) {
            const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
            MppiConfig off = base;
            off.filter.reset();
            off.seed = seed;
            push_mppi("filter_off_s" + std::to_string(seed), off, cfg.scenario.variant,
                      "filter_window", 0.0);
            MppiConfig on = base;
            on.filter = filter;
            on.seed = seed;
            push_mppi("filter_on_s" + std::to_string(seed), on, cfg.scenario.variant,
                      "filter_window", static_cast<double>(filter.window));
        }
    } else if (kind == "pid-compare") {
        for (BuoyancyVariant v : {BuoyancyVariant::kNeutral, BuoyancyVariant::kNegative,
                                  BuoyancyVariant::kPositive}) {
            const std::string vn = to_string(v);
            for (int r = 0; r < reps; ++r) {
                MppiConfig m = base;
                m.seed = base_seed + static_cast<std::uint64_t>(r);
                push_mppi(vn + "_mppi_s" + std::to_string(m.seed), m, v, "", 0.0);
            }
            jobs.push_back({vn + "_pid", "pid", v, base, "", 0.0});
            jobs.push_back({vn + "_cascade", "cascade", v, base, "", 0.0});
        }
    } else if (kind == "obstacle-course") {
        for (BuoyancyVariant v : {BuoyancyVariant::kNeutral, BuoyancyVariant::kNegative,
                                  BuoyancyVariant::kPositive}) {
            for (int r = 0; r < reps; ++r) {
                MppiConfig m = base;
                m.seed = base_seed + static_cast<std::uint64_t>(r);
                push_mppi("course_" + std::string(to_string(v)) + "_s" + std::to_string(m.seed),
                          m, v, "", 0.0);
            }
        }
    } else {
        std::string known;
        for (const auto& k : experiment_kinds()) known += (known.empty() ? "" : ", ") + k;
        throw ConfigError("unknown experiment kind '" + kind + "' (known: " + known + ")");
    }
    return jobs;
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

namespace detail {

inline void write_outcomes_csv(const std::vector<EpisodeOutcome>& outcomes,
                               const std::string& experiment,
                               const std::filesystem::path& path) {
    write_atomic(path, [&](const std::filesystem::path& tmp) {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << std::setprecision(17);
        out << "tag,experiment,controller,variant,param_name,param_value,seed,diverged";
        for (const auto& [key, value] : metrics_items(Metrics{})) out << ',' << key;
        out << "\n";
        for (const auto& o : outcomes) {
            out << o.tag << ',' << experiment << ',' << o.controller << ',' << o.variant << ','
                << o.param_name << ',' << o.param_value << ',' << o.seed << ','
                << (o.diverged ? 1 : 0);
            for (const auto& [key, value] : metrics_items(o.metrics)) out << ',' << value;
            out << "\n";
        }
        if (!out) throw IoError("write failed: " + tmp.string());
    });
}

}  // namespace detail

/**
 * Ranked summary of an experiment: one line per configuration (controller,
 * variant, and swept value), medians across repetitions, ordered by
 * steady-state position error and then settling time.
 */
inline std::string format_summary(const std::string& experiment,
                                  const std::vector<EpisodeOutcome>& outcomes) {
    struct Group {
        std::string label;
        std::vector<double> ss_pos;
        std::vector<double> settling;
        std::vector<double> overshoot;
        std::vector<double> wall_ms;
        int collisions{0};
        int diverged{0};
        int n{0};
    };
    std::map<std::string, Group> groups;
    for (const auto& o : outcomes) {
        std::string label = o.controller;
        if (!o.param_name.empty()) {
            label += " " + o.param_name + "=" + detail::format_value(o.param_value);
        }
        label += " (" + o.variant + ")";
        Group& g = groups[label];
        g.label = label;
        g.n += 1;
        if (o.diverged) {
            g.diverged += 1;
            continue;  // a diverged episode has no meaningful steady-state numbers
        }
        g.ss_pos.push_back(o.metrics.ss_error_pos.norm());
        g.settling.push_back(o.metrics.settling_time);
        g.overshoot.push_back(o.metrics.overshoot_pct);
        g.wall_ms.push_back(o.metrics.mean_wall_ms);
        g.collisions = std::max(g.collisions, o.metrics.collision_count);
    }

    struct Row {
        std::string label;
        double ss, settling, overshoot, wall;
        int collisions, diverged, n;
    };
    std::vector<Row> rows;
    for (auto& [label, g] : groups) {
        rows.push_back({g.label, detail::median(g.ss_pos), detail::median(g.settling),
                        detail::median(g.overshoot), detail::median(g.wall_ms), g.collisions,
                        g.diverged, g.n});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.diverged != b.diverged) return a.diverged < b.diverged;
        if (a.ss != b.ss) return a.ss < b.ss;
        if (a.settling != b.settling) return a.settling < b.settling;
        return a.label < b.label;
    });

    std::ostringstream out;
    out << "experiment: " << experiment << "  (" << outcomes.size()
        << " episodes; medians across repetitions, ranked by steady-state error, then settling)\n";
    out << std::left << std::setw(34) << "configuration" << std::right << std::setw(12)
        << "ss err [m]" << std::setw(13) << "settle [s]" << std::setw(13) << "overshoot %"
        << std::setw(12) << "wall [ms]" << std::setw(12) << "collisions" << std::setw(10)
        << "diverged" << "\n";
    out << std::setprecision(4) << std::fixed;
    for (const auto& r : rows) {
        out << std::left << std::setw(34) << r.label << std::right << std::setw(12) << r.ss
            << std::setw(13) << r.settling << std::setw(13) << r.overshoot << std::setw(12)
            << r.wall << std::setw(12) << r.collisions << std::setw(10) << r.diverged << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/**
 * Run one experiment end to end.
 *
 * Layout written under `spec.out_dir`:
 *   manifest.json        — kind, base seed, version, and the fully resolved
 *                          configuration; enough to reproduce the run exactly
 *   runs/<tag>/trajectory.csv   (+ diagnostics.csv for sampling runs,
 *                                  metrics.csv per episode)
 *   metrics.csv          — one row per episode, rewritten as episodes finish
 *   summary.txt          — ranked configuration table
 *
 * A diverged plant does not abort the experiment: the episode is recorded
 * with its partial trajectory and flagged, and `any_diverged` is set so the
 * command line can exit with the divergence status.
 *
 * The AUVCTRL_WORKERS environment variable, when set, fixes the rollout
 * worker count; results are bit-identical across worker counts by design.
 */
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       std::ostream& progress = std::cout) {
    namespace fs = std::filesystem;

    RunConfig cfg = load_run_config(spec.scenario_file, spec.overrides);
    if (spec.seed) {
        cfg.mppi.seed = *spec.seed;
        cfg.resolved["mppi"]["seed"] = *spec.seed;
    }
    if (const char* env = std::getenv("AUVCTRL_WORKERS")) {
        int workers = 0;
        try {
            std::size_t pos = 0;
            workers = std::stoi(env, &pos);
            if (pos != std::string(env).size()) workers = 0;
        } catch (const std::exception&) {
            workers = 0;
        }
        if (workers <= 0) {
            throw ConfigError(std::string("AUVCTRL_WORKERS must be a positive integer, got '") +
                              env + "'");
        }
        cfg.mppi.workers = workers;
        cfg.resolved["mppi"]["workers"] = workers;
    }

    const VehicleModel vehicle = load_run_vehicle(cfg);
    const std::vector<EpisodeJob> jobs = plan_experiment(spec.kind, cfg, vehicle);

    fs::create_directories(spec.out_dir / "runs");

    json manifest;
    manifest["experiment"] = spec.kind;
    manifest["scenario_file"] =
        spec.scenario_file ? json(spec.scenario_file->string()) : json(nullptr);
    manifest["overrides"] = spec.overrides;
    manifest["base_seed"] = cfg.mppi.seed;
    manifest["version"] = AUVCTRL_VERSION;
    manifest["config"] = cfg.resolved;
    detail::write_atomic(spec.out_dir / "manifest.json", [&](const fs::path& tmp) {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << manifest.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + tmp.string());
    });

    ExperimentResult result;
    result.out_dir = spec.out_dir;

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const EpisodeJob& job = jobs[i];
        Scenario scenario = cfg.scenario;
        scenario.variant = job.variant;

        std::unique_ptr<Controller> controller;
        if (job.controller == "mppi") {
            controller = std::make_unique<MppiWaypointController>(
                vehicle, job.mppi, make_waypoint_cost(scenario, cfg.weights),
                scenario.control_dt);
        } else if (job.controller == "pid") {
            controller = std::make_unique<SinglePidController>(vehicle, scenario.goal,
                                                               scenario.control_dt,
                                                               cfg.pid_gains);
        } else {
            controller = std::make_unique<CascadePidController>(vehicle, scenario.goal,
                                                                scenario.control_dt,
                                                                cfg.cascade_gains);
        }

        TrajectoryLog log;
        EpisodeOutcome outcome;
        outcome.tag = job.tag;
        outcome.controller = job.controller;
        outcome.variant = to_string(job.variant);
        outcome.param_name = job.param_name;
        outcome.param_value = job.param_value;
        outcome.seed = job.mppi.seed;
        try {
            log = run_episode(*controller, scenario, vehicle);
        } catch (const PlantDiverged& e) {
            log = e.log();
            outcome.diverged = true;
        } catch (const AllSamplesRejected&) {
            outcome.diverged = true;  // controller lost every sample; nothing to command
        }
        if (!log.rows.empty()) outcome.metrics = compute_metrics(log, scenario);

        const fs::path run_dir = spec.out_dir / "runs" / job.tag;
        fs::create_directories(run_dir);
        detail::write_atomic(run_dir / "trajectory.csv", [&](const fs::path& tmp) {
            write_trajectory_csv(log, tmp);
        });
        if (job.controller == "mppi") {
            detail::write_atomic(run_dir / "diagnostics.csv", [&](const fs::path& tmp) {
                write_diagnostics_csv(log, tmp);
            });
        }
        if (!log.rows.empty()) {
            detail::write_atomic(run_dir / "metrics.csv", [&](const fs::path& tmp) {
                write_metrics_csv(outcome.metrics, tmp);
            });
        }

        result.outcomes.push_back(outcome);
        result.any_diverged = result.any_diverged || outcome.diverged;
        detail::write_outcomes_csv(result.outcomes, spec.kind, spec.out_dir / "metrics.csv");

        progress << "[" << (i + 1) << "/" << jobs.size() << "] " << job.tag
                 << (outcome.diverged ? "  DIVERGED" : "") << "  ss_err="
                 << detail::format_value(outcome.metrics.ss_error_pos.norm())
                 << " m  settle=" << detail::format_value(outcome.metrics.settling_time)
                 << " s  wall=" << detail::format_value(outcome.metrics.mean_wall_ms) << " ms\n";
    }

    const std::string summary = format_summary(spec.kind, result.outcomes);
    detail::write_atomic(spec.out_dir / "summary.txt", [&](const fs::path& tmp) {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << summary;
        if (!out) throw IoError("write failed: " + tmp.string());
    });
    progress << "\n" << summary;
    return result;
}

// ---------------------------------------------------------------------------
// Plot extraction
// ---------------------------------------------------------------------------

/**
 * Turn a finished experiment directory into plot-ready two-column series
 * under <dir>/plots/:
 *
 *   <tag>.{x,y,z,yaw}.dat — signed tracking error against time for one
 *       representative episode (lowest seed) of every configuration, e.g.
 *       one x-error series per K value for a sample-count sweep, or one
 *       series per controller and axis for the baseline comparison
 *   <param>_vs_ss_error.dat — swept value against the median steady-state
 *       position error, for sweep experiments
 *
 * Each .dat file is "value value" rows with a '#' comment header, directly
 * consumable by gnuplot's `plot ... with lines`. Throws MissingData when the
 * directory lacks a manifest, a metrics table, or a referenced trajectory.
 */
inline void emit_plots(const std::filesystem::path& dir, std::ostream& progress = std::cout) {
    namespace fs = std::filesystem;
    using detail::column_index;
    using detail::to_double;

    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw MissingData("missing input file: " + manifest_path.string() +
                          " (is this an experiment output directory?)");
    }
    const json manifest = load_json_file(manifest_path);
    if (!manifest.contains("config")) {
        throw MissingData(manifest_path.string() + ": missing 'config'");
    }
    const json& goal = manifest["config"]["goal"];
    const Eigen::Vector3d goal_pos(goal["position"][0].get<double>(),
                                   goal["position"][1].get<double>(),
                                   goal["position"][2].get<double>());
    const Eigen::Vector3d goal_rotvec(goal["orientation_rotvec"][0].get<double>(),
                                      goal["orientation_rotvec"][1].get<double>(),
                                      goal["orientation_rotvec"][2].get<double>());
    const UnitQuaternion goal_q = UnitQuaternion::from_rotation_vector(goal_rotvec);
    const double goal_yaw = detail::yaw_of(goal_q.w(), goal_q.x(), goal_q.y(), goal_q.z());

    const fs::path metrics_path = dir / "metrics.csv";
    const auto metrics_rows = detail::read_csv_rows(metrics_path);
    if (metrics_rows.size() < 2) {
        throw MissingData(metrics_path.string() + ": no episodes recorded");
    }
    const auto& header = metrics_rows.front();
    const std::size_t c_tag = column_index(header, "tag", metrics_path);
    const std::size_t c_controller = column_index(header, "controller", metrics_path);
    const std::size_t c_variant = column_index(header, "variant", metrics_path);
    const std::size_t c_pname = column_index(header, "param_name", metrics_path);
    const std::size_t c_pvalue = column_index(header, "param_value", metrics_path);
    const std::size_t c_seed = column_index(header, "seed", metrics_path);
    const std::size_t c_ss_x = column_index(header, "ss_error_x", metrics_path);
    const std::size_t c_ss_y = column_index(header, "ss_error_y", metrics_path);
    const std::size_t c_ss_z = column_index(header, "ss_error_z", metrics_path);
    const std::size_t c_diverged = column_index(header, "diverged", metrics_path);

    struct Episode {
        std::string tag, controller, variant, param_name;
        double param_value, seed, ss_norm;
        bool diverged;
    };
    std::vector<Episode> episodes;
    for (std::size_t r = 1; r < metrics_rows.size(); ++r) {
        const auto& row = metrics_rows[r];
        if (row.size() != header.size()) {
            throw MissingData(metrics_path.string() + ": malformed row " + std::to_string(r));
        }
        const Eigen::Vector3d ss(to_double(row[c_ss_x], metrics_path),
                                 to_double(row[c_ss_y], metrics_path),
                                 to_double(row[c_ss_z], metrics_path));
        episodes.push_back({row[c_tag], row[c_controller], row[c_variant], row[c_pname],
                            to_double(row[c_pvalue], metrics_path),
                            to_double(row[c_seed], metrics_path), ss.norm(),
                            to_double(row[c_diverged], metrics_path) != 0.0});
    }

    fs::create_directories(dir / "plots");
    int files_written = 0;

    // Representative per configuration: the lowest-seed episode.
    std::map<std::string, const Episode*> representatives;
    for (const auto& e : episodes) {
        const std::string key = e.controller + "|" + e.variant + "|" + e.param_name + "|" +
                                detail::format_value(e.param_value);
        auto [it, inserted] = representatives.try_emplace(key, &e);
        if (!inserted && e.seed < it->second->seed) it->second = &e;
    }

    for (const auto& [key, episode] : representatives) {
        const fs::path traj_path = dir / "runs" / episode->tag / "trajectory.csv";
        const auto rows = detail::read_csv_rows(traj_path);
        if (rows.size() < 2) throw MissingData(traj_path.string() + ": no samples");
        const auto& th = rows.front();
        const std::size_t c_time = column_index(th, "time", traj_path);
        const std::size_t c_px = column_index(th, "px", traj_path);
        const std::size_t c_py = column_index(th, "py", traj_path);
        const std::size_t c_pz = column_index(th, "pz", traj_path);
        const std::size_t c_qw = column_index(th, "qw", traj_path);
        const std::size_t c_qx = column_index(th, "qx", traj_path);
        const std::size_t c_qy = column_index(th, "qy", traj_path);
        const std::size_t c_qz = column_index(th, "qz", traj_path);

        const std::array<std::string, 4> axes = {"x", "y", "z", "yaw"};
        std::array<std::ostringstream, 4> series;
        for (std::size_t a = 0; a < 4; ++a) {
            series[a] << "# " << episode->tag << ": " << axes[a]
                      << "-axis tracking error against time [s]\n"
                      << std::setprecision(17);
        }
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() != th.size()) {
                throw MissingData(traj_path.string() + ": malformed row " + std::to_string(r));
            }
            const double t = to_double(row[c_time], traj_path);
            series[0] << t << ' ' << to_double(row[c_px], traj_path) - goal_pos.x() << "\n";
            series[1] << t << ' ' << to_double(row[c_py], traj_path) - goal_pos.y() << "\n";
            series[2] << t << ' ' << to_double(row[c_pz], traj_path) - goal_pos.z() << "\n";
            const double yaw = detail::yaw_of(
                to_double(row[c_qw], traj_path), to_double(row[c_qx], traj_path),
                to_double(row[c_qy], traj_path), to_double(row[c_qz], traj_path));
            series[3] << t << ' ' << detail::wrap_angle(yaw - goal_yaw) << "\n";
        }
        for (std::size_t a = 0; a < 4; ++a) {
            detail::write_atomic(dir / "plots" / (episode->tag + "." + axes[a] + ".dat"),
                                 [&](const fs::path& tmp) {
                                     std::ofstream out(tmp);
                                     if (!out) {
                                         throw IoError("cannot open for writing: " + tmp.string());
                                     }
                                     out << series[a].str();
                                     if (!out) throw IoError("write failed: " + tmp.string());
                                 });
            ++files_written;
        }
    }

    // Sweep curve: swept value against median steady-state error.
    std::map<std::string, std::map<double, std::vector<double>>> sweeps;
    for (const auto& e : episodes) {
        if (e.param_name.empty() || e.diverged) continue;
        sweeps[e.param_name][e.param_value].push_back(e.ss_norm);
    }
    for (const auto& [param, points] : sweeps) {
        detail::write_atomic(dir / "plots" / (param + "_vs_ss_error.dat"),
                             [&](const fs::path& tmp) {
                                 std::ofstream out(tmp);
                                 if (!out) {
                                     throw IoError("cannot open for writing: " + tmp.string());
                                 }
                                 out << "# " << param
                                     << " against median steady-state position error [m]\n"
                                     << std::setprecision(17);
                                 for (const auto& [value, errors] : points) {
                                     out << value << ' ' << detail::median(errors) << "\n";
                                 }
                                 if (!out) throw IoError("write failed: " + tmp.string());
                             });
        ++files_written;
    }

    progress << "wrote " << files_written << " series under " << (dir / "plots").string()
             << "\n";
}

}  // namespace auvctrl
