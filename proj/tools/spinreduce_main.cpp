#include <cstdio>

#include <CLI11.hpp>

#include "spinreduce/cli.hpp"

namespace {

void add_run_options(CLI::App* sub, spinreduce::RunConfig& config) {
    sub->add_option("--model", config.model, "energy | local-spins | custom")
        ->capture_default_str();
    sub->add_option("--custom-generators", config.custom_generators,
                    "JSON file with generators and couplings (required with --model custom)");
    sub->add_option("--sigma", config.sigma, "coupling strength of the built-in models")
        ->capture_default_str();
    sub->add_option("--n", config.n, "ensemble size")->capture_default_str();
    sub->add_option("--dt", config.dt, "time step")->capture_default_str();
    sub->add_option("--collapse-tol", config.collapse_tol,
                    "total generator variance at which a trajectory counts as collapsed")
        ->capture_default_str();
    sub->add_option("--max-steps", config.max_steps, "step limit per trajectory")
        ->capture_default_str();
    sub->add_option("--seed", config.seed, "master seed")->capture_default_str();
    sub->add_option("--snapshots", config.snapshots, "diagnostic snapshots per trajectory")
        ->capture_default_str();
    sub->add_option("--threads", config.threads,
                    "worker count (0: SPINREDUCE_THREADS or the OpenMP default)")
        ->capture_default_str();
    sub->add_option("--out-dir", config.out_dir, "directory for output files")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic state-reduction laboratory for a two-spin system"};
    app.require_subcommand(1);

    spinreduce::RunConfig config;

    CLI::App* discriminate = app.add_subcommand(
        "discriminate",
        "Run the energy-measurement ensemble and report the outcome statistics, "
        "the viability probability and the total-spin discriminator");
    add_run_options(discriminate, config);

    CLI::App* martingale = app.add_subcommand(
        "martingale", "Track the ensemble energy mean and variance over time");
    add_run_options(martingale, config);

    CLI::App* histogram = app.add_subcommand(
        "histogram", "Bin the degenerate outcomes over the zero-energy sphere");
    add_run_options(histogram, config);
    histogram->add_option("--z-bins", config.z_bins, "bins in cos(theta)")
        ->capture_default_str();
    histogram->add_option("--phi-bins", config.phi_bins, "bins in phi")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (discriminate->parsed()) {
            return spinreduce::cmd_discriminate(config);
        }
        if (martingale->parsed()) {
            return spinreduce::cmd_martingale(config);
        }
        return spinreduce::cmd_histogram(config);
    } catch (const spinreduce::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
