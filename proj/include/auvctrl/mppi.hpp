#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "auvctrl/costs.hpp"
#include "auvctrl/dynamics.hpp"
#include "auvctrl/savgol.hpp"

namespace auvctrl {

// Thrown when every sampled rollout hit an obstacle: there is nothing to
// average, the caller must decide how to recover.
struct AllSamplesRejected : std::runtime_error {
    AllSamplesRejected() : std::runtime_error("mppi: every sampled rollout was rejected") {}
};

// Planned control tape: horizon x thruster_count, entries in newtons.
using ActionSequence = Eigen::MatrixXd;

struct MppiConfig {
    int num_samples{2000};       // K
    int horizon{25};             // steps of lookahead at the control period
    Eigen::VectorXd noise_std;   // per-thruster sampling std [N]
    double lambda{0.06};         // softmax temperature

    // Control-effort term per step: lambda * u . (eps / sigma^2) by default
    // (the importance-sampling form); true selects the literal
    // lambda * u . (sigma * eps) variant instead.
    bool literal_sigma_cost{false};

    struct Filter {
        int window{5};
        int poly_order{2};
    };
    std::optional<Filter> filter{};

    enum class ShiftInit { kCopyLast, kZero };
    ShiftInit shift_init{ShiftInit::kCopyLast};

    std::uint64_t seed{0};
    int workers{1};
};

// Validates an MppiConfig against a vehicle with n thrusters. Throws
// ConfigError naming the offending field.
inline void validate(const MppiConfig& cfg, Eigen::Index n_thrusters) {
    if (cfg.num_samples < 1) throw ConfigError("mppi.num_samples must be >= 1");
    if (cfg.horizon < 1) throw ConfigError("mppi.horizon must be >= 1");
    if (!(cfg.lambda > 0.0)) throw ConfigError("mppi.lambda must be > 0");
    if (cfg.noise_std.size() != n_thrusters) {
        throw ConfigError("mppi.noise_std must have one entry per thruster (" +
                          std::to_string(n_thrusters) + "), got " +
                          std::to_string(cfg.noise_std.size()));
    }
    if (!(cfg.noise_std.array() > 0.0).all()) {
        throw ConfigError("mppi.noise_std entries must be > 0");
    }
    if (cfg.filter) {
        if (cfg.filter->window % 2 == 0 || cfg.filter->window < 1) {
            throw ConfigError("mppi.filter.window must be odd and positive");
        }
        if (cfg.filter->poly_order < 0 || cfg.filter->poly_order >= cfg.filter->window) {
            throw ConfigError("mppi.filter.poly_order must satisfy 0 <= order < window");
        }
        if (cfg.filter->window > cfg.horizon) {
            throw ConfigError("mppi.filter.window must not exceed mppi.horizon");
        }
    }
    if (cfg.workers < 1) throw ConfigError("mppi.workers must be >= 1");
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream key for one (seed, control step, sample) triple. Decoupling the
// stream from worker scheduling makes sampling bit-reproducible under any
// thread count.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t step, std::uint64_t sample) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ step);
    h = splitmix64(h ^ sample);
    return h;
}

}  // namespace detail

/**
 * K perturbation sequences stored as K stacked (horizon x n) blocks.
 */
class NoiseBatch {
  public:
    NoiseBatch() = default;
    NoiseBatch(int num_samples, int horizon, Eigen::Index n)
        : k_(num_samples), tau_(horizon), data_(num_samples * horizon, n) {}

    int num_samples() const { return k_; }
    int horizon() const { return tau_; }

    Eigen::Block<Eigen::MatrixXd> sample(int k) { return data_.middleRows(k * tau_, tau_); }
    Eigen::Block<const Eigen::MatrixXd> sample(int k) const {
        return data_.middleRows(k * tau_, tau_);
    }

  private:
    int k_{0};
    int tau_{0};
    Eigen::MatrixXd data_;
};

// Fills one sample's (horizon x n) block from its dedicated Gaussian stream,
// row-major (time outer, thruster inner).
template <class Block>
void fill_sample_noise(const MppiConfig& cfg, std::uint64_t step, int sample, Block&& out) {
    std::mt19937_64 eng(detail::stream_seed(cfg.seed, step, static_cast<std::uint64_t>(sample)));
    std::normal_distribution<double> unit;
    for (int t = 0; t < out.rows(); ++t) {
        for (Eigen::Index i = 0; i < out.cols(); ++i) {
            out(t, i) = cfg.noise_std[i] * unit(eng);
        }
    }
}

// All K perturbation sequences for one control step.
inline NoiseBatch sample_noise(const MppiConfig& cfg, std::uint64_t step) {
    NoiseBatch batch(cfg.num_samples, cfg.horizon, cfg.noise_std.size());
    parallel_for(cfg.workers, 0, cfg.num_samples,
                 [&](int k) { fill_sample_noise(cfg, step, k, batch.sample(k)); });
    return batch;
}

// Per-sample accumulated costs; rejected[k] marks rollouts that hit an
// obstacle (a dedicated flag rather than an infinite cost, so no non-finite
// values flow into the weight computation).
struct RolloutCosts {
    Eigen::VectorXd value;
    std::vector<char> rejected;
};

/**
 * Cost-to-go of one perturbed rollout:
 *
 *   S = sum_t [ q(x_t) + lambda * u_{t-1} . W eps_eff_{t-1} ] + phi(x_tau)
 *
 * with W = diag(1/sigma^2) (or diag(sigma) in the literal variant), the
 * perturbed input clamped to +-max_thrust before stepping, and eps_eff the
 * clamped perturbation actually applied. Returns nullopt when any visited
 * state collides. The cost functor provides step/terminal/collides.
 */
template <class Cost>
std::optional<double> rollout_cost(const VehicleModel& model, const VehicleState& x0,
                                   const ActionSequence& u,
                                   const Eigen::Ref<const Eigen::MatrixXd>& eps, const Cost& cost,
                                   const MppiConfig& cfg, double dt,
                                   const Wrench& tau_ext = Wrench{}) {
    const Eigen::Index n = u.cols();
    const int tau = static_cast<int>(u.rows());
    const double limit = model.max_thrust();

    Eigen::VectorXd effort_weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = cfg.noise_std[i];
        effort_weight[i] = cfg.literal_sigma_cost ? s : 1.0 / (s * s);
    }

    Eigen::VectorXd cmd(n);
    VehicleState x = x0;
    double s_total = 0.0;
    for (int t = 0; t < tau; ++t) {
        cmd = (u.row(t) + eps.row(t)).cwiseMax(-limit).cwiseMin(limit).transpose();
        x = step(model, x, cmd, tau_ext, dt).state;
        if (!x.finite()) throw NonFiniteState();
        if (cost.collides(x)) return std::nullopt;

        double effort = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            effort += u(t, i) * effort_weight[i] * (cmd[i] - u(t, i));
        }
        s_total += cost.step(x) + cfg.lambda * effort;
    }
    s_total += cost.terminal(x);
    return s_total;
}

struct WeightInfo {
    Eigen::VectorXd omega;  // normalized weights, rejected samples get 0
    double beta{0.0};       // minimum finite cost
    double eta{0.0};        // sum of unnormalized weights
};

/**
 * Exponential softmin weighting with the minimum cost subtracted first, so
 * the best sample's unnormalized weight is exactly 1 and exp never
 * underflows for near-optimal samples.
 */
inline WeightInfo compute_weights(const RolloutCosts& costs, double lambda) {
    const Eigen::Index k = costs.value.size();
    WeightInfo info;
    info.omega = Eigen::VectorXd::Zero(k);

    double beta = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!costs.rejected[i]) beta = std::min(beta, costs.value[i]);
    }
    if (!std::isfinite(beta)) throw AllSamplesRejected();
    info.beta = beta;

    double eta = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (costs.rejected[i]) continue;
        const double w = std::exp(-(costs.value[i] - beta) / lambda);
        info.omega[i] = w;
        eta += w;  // ordered fold: index order, independent of workers
    }
    info.eta = eta;
    info.omega /= eta;
    return info;
}

// U'_t = clamp(U_t + sum_k omega_k eps^k_t). Serial ordered accumulation.
inline ActionSequence update_sequence(const ActionSequence& u, const WeightInfo& weights,
                                      const NoiseBatch& noise, double max_thrust) {
    ActionSequence out = u;
    for (int k = 0; k < noise.num_samples(); ++k) {
        if (weights.omega[k] != 0.0) out += weights.omega[k] * noise.sample(k);
    }
    return out.cwiseMax(-max_thrust).cwiseMin(max_thrust);
}

// Receding-horizon shift: drop the executed first action, slide the rest
// forward, re-initialize the final slot.
inline ActionSequence shift_sequence(const ActionSequence& u,
                                     MppiConfig::ShiftInit init = MppiConfig::ShiftInit::kCopyLast) {
    ActionSequence out(u.rows(), u.cols());
    const Eigen::Index tau = u.rows();
    out.topRows(tau - 1) = u.bottomRows(tau - 1);
    if (init == MppiConfig::ShiftInit::kZero) {
        out.row(tau - 1).setZero();
    } else {
        out.row(tau - 1) = u.row(tau - 1);
    }
    return out;
}

// Per-control-step health record. Columns match the diagnostics CSV.
struct StepDiagnostics {
    std::uint64_t step{0};
    double wall_ms{0.0};
    double beta{0.0};
    double eta{0.0};
    double eta_over_k{0.0};
    double min_cost{0.0};
    double mean_cost{0.0};
    double rejected_fraction{0.0};
};

/**
 * Sampling-based receding-horizon controller: each control_step samples K
 * perturbed action tapes, rolls them through the prediction model, averages
 * them with exponential weights, optionally smooths the tape, emits the
 * first action, and shifts.
 *
 * The planned tape starts at zero thrust. Instances are single-owner: one
 * control_step at a time (the K rollouts inside fan out over cfg.workers).
 */
template <class Cost = WaypointCost>
class MppiController {
  public:
    MppiController(VehicleModel model, MppiConfig cfg, Cost cost, double control_dt,
                   Wrench tau_ext = Wrench{})
        : model_(std::move(model)),
          cfg_(std::move(cfg)),
          cost_(std::move(cost)),
          dt_(control_dt),
          tau_ext_(tau_ext) {
        validate(cfg_, model_.thruster_count());
        if (!(dt_ > 0.0) || dt_ > 0.2) throw ConfigError("control_dt must be in (0, 0.2]");
        reset();
    }

    struct Output {
        Eigen::VectorXd command;  // first action of the updated tape [N]
        StepDiagnostics diagnostics;
    };

    Output control_step(const VehicleState& x0) {
        const auto t_start = std::chrono::steady_clock::now();

        NoiseBatch noise(cfg_.num_samples, cfg_.horizon, model_.thruster_count());
        RolloutCosts costs;
        costs.value.resize(cfg_.num_samples);
        costs.rejected.assign(cfg_.num_samples, 0);

        parallel_for(cfg_.workers, 0, cfg_.num_samples, [&](int k) {
            fill_sample_noise(cfg_, step_counter_, k, noise.sample(k));
            const auto s =
                rollout_cost(model_, x0, u_, noise.sample(k), cost_, cfg_, dt_, tau_ext_);
            if (s) {
                costs.value[k] = *s;
            } else {
                costs.value[k] = std::numeric_limits<double>::quiet_NaN();
                costs.rejected[k] = 1;
            }
        });

        const WeightInfo weights = compute_weights(costs, cfg_.lambda);
        u_ = update_sequence(u_, weights, noise, model_.max_thrust());
        if (cfg_.filter) {
            u_ = sg_smooth(u_, cfg_.filter->window, cfg_.filter->poly_order)
                     .cwiseMax(-model_.max_thrust())
                     .cwiseMin(model_.max_thrust());
        }

        Output out;
        out.command = u_.row(0).transpose();
        u_ = shift_sequence(u_, cfg_.shift_init);

        int n_rejected = 0;
        double cost_sum = 0.0;
        for (int k = 0; k < cfg_.num_samples; ++k) {
            if (costs.rejected[k]) {
                ++n_rejected;
            } else {
                cost_sum += costs.value[k];
            }
        }
        const int n_finite = cfg_.num_samples - n_rejected;

        out.diagnostics.step = step_counter_;
        out.diagnostics.beta = weights.beta;
        out.diagnostics.eta = weights.eta;
        out.diagnostics.eta_over_k = weights.eta / cfg_.num_samples;
        out.diagnostics.min_cost = weights.beta;
        out.diagnostics.mean_cost = n_finite > 0 ? cost_sum / n_finite : 0.0;
        out.diagnostics.rejected_fraction =
            static_cast<double>(n_rejected) / cfg_.num_samples;
        out.diagnostics.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
                .count();

        ++step_counter_;
        return out;
    }

    // Drops all learned state: zero tape, step counter back to 0.
    void reset() {
        u_ = ActionSequence::Zero(cfg_.horizon, model_.thruster_count());
        step_counter_ = 0;
    }

    const ActionSequence& planned_sequence() const { return u_; }
    const VehicleModel& model() const { return model_; }
    const MppiConfig& config() const { return cfg_; }
    const Cost& cost() const { return cost_; }
    double control_dt() const { return dt_; }

  private:
    VehicleModel model_;
    MppiConfig cfg_;
    Cost cost_;
    double dt_;
    Wrench tau_ext_;
    ActionSequence u_;
    std::uint64_t step_counter_{0};
};

}  // namespace auvctrl
