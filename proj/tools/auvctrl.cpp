// Command-line front end for the waypoint-control experiment suite.
//
// Subcommands:
//   run    — execute one experiment and write its artifact directory
//   plots  — extract gnuplot-ready series from a finished experiment
//
// Exit codes: 0 success, 1 configuration or input error, 2 runtime
// divergence (a plant blew up or the sampler lost every candidate).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <auvctrl/experiments.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Sampling-based waypoint control experiments for an underwater vehicle"};
    app.set_version_flag("--version", AUVCTRL_VERSION);
    app.require_subcommand(1);

    std::string kind;
    std::string scenario;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "Run one experiment and write its artifacts");
    run->add_option("--experiment", kind, "Experiment kind")
        ->required()
        ->check(CLI::IsMember(auvctrl::experiment_kinds()));
    run->add_option("--scenario", scenario,
                    "Scenario JSON file (built-in defaults when omitted)")
        ->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory for the experiment artifacts")
        ->required();
    run->add_option("--set", overrides,
                    "Override one configuration value, e.g. --set mppi.num_samples=500")
        ->type_name("KEY=VALUE");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "Base seed (repetition r runs with seed base + r)");

    std::string plots_dir;
    CLI::App* plots =
        app.add_subcommand("plots", "Extract plot-ready series from a finished experiment");
    plots->add_option("dir", plots_dir, "Experiment output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 1;
    }

    try {
        if (run->parsed()) {
            auvctrl::ExperimentSpec spec;
            spec.kind = kind;
            if (!scenario.empty()) spec.scenario_file = std::filesystem::path(scenario);
            spec.overrides = overrides;
            spec.out_dir = out_dir;
            if (seed_opt->count() > 0) spec.seed = seed;
            const auvctrl::ExperimentResult result = auvctrl::run_experiment(spec, std::cout);
            if (result.any_diverged) {
                std::cerr << "one or more episodes diverged; see metrics.csv\n";
                return 2;
            }
            return 0;
        }
        auvctrl::emit_plots(plots_dir, std::cout);
        return 0;
    } catch (const auvctrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const auvctrl::MissingData& e) {
        std::cerr << "missing data: " << e.what() << "\n";
        return 1;
    } catch (const auvctrl::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
