#include <cstdio>
#include <filesystem>

#include "spinreduce/cli.hpp"

namespace spinreduce {

namespace {

std::string out_path(const RunConfig& config, const char* name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

void ensure_out_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + config.out_dir +
                      "': " + ec.message());
    }
}

void print_summary(const EnsembleReport& report, std::span<const LudersOutcome> luders) {
    const auto luders_prob = [&](int eigenvalue) {
        for (const LudersOutcome& o : luders) {
            if (o.eigenvalue == eigenvalue) {
                return o.probability;
            }
        }
        return 0.0;
    };
    std::printf("outcome   frequency      se          projection postulate\n");
    const OutcomeStat* stats[3] = {&report.freq_plus, &report.freq_zero, &report.freq_minus};
    const int eigenvalues[3] = {+1, 0, -1};
    const char* labels[3] = {"+1", " 0", "-1"};
    for (int i = 0; i < 3; ++i) {
        std::printf("  %s      %.6f     %.6f    %.6f\n", labels[i], stats[i]->frequency,
                    stats[i]->se, luders_prob(eigenvalues[i]));
    }
    std::printf("p_hat          %.6f +- %.6f\n", report.p_hat.value, report.p_hat.se);
    std::printf("conservation   %+.6f +- %.6f\n", report.conservation.value,
                report.conservation.se);
    std::printf("s2 statistic   %.6f +- %.6f\n", report.s2.value, report.s2.se);
    std::printf("records %lld (degenerate %lld), excluded without collapse %lld\n",
                (long long)report.n_total, (long long)report.n_degenerate,
                (long long)report.n_failed);
}

int run_config_checked(const RunConfig& config, int (*body)(const RunConfig&)) {
    try {
        validate_config(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    try {
        return body(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int cmd_discriminate(const RunConfig& config) {
    return run_config_checked(config, [](const RunConfig& cfg) {
        const ReductionModel model = model_from_config(cfg);
        const EnsembleResult ensemble =
            run_ensemble(model, cfg.n, params_from_config(cfg), cfg.seed, cfg.threads);
        const EnsembleReport report = make_report(ensemble);
        const auto luders = luders_reference(initial_state());

        ensure_out_dir(cfg);
        write_file_atomic(out_path(cfg, "report.json"),
                          format_report_json(cfg, report, luders));
        write_file_atomic(out_path(cfg, "records.csv"), format_records_csv(ensemble.records));

        print_summary(report, luders);
        return ensemble.n_failed > 0 ? 3 : 0;
    });
}

int cmd_martingale(const RunConfig& config) {
    return run_config_checked(config, [](const RunConfig& cfg) {
        const ReductionModel model = model_from_config(cfg);
        const auto trajectories = run_trajectories(
            initial_state(), model, cfg.n, params_from_config(cfg), cfg.seed, cfg.threads);
        const auto energy = martingale_statistics(trajectories, MartingaleQuantity::EnergyMean);
        const auto variance =
            martingale_statistics(trajectories, MartingaleQuantity::EnergyVariance);

        ensure_out_dir(cfg);
        write_file_atomic(out_path(cfg, "martingale.csv"),
                          format_martingale_csv(energy, variance));

        std::int64_t n_failed = 0;
        for (const Trajectory& t : trajectories) {
            if (!t.collapsed) {
                ++n_failed;
            }
        }
        std::printf("wrote %zu snapshot rows to %s\n", energy.size(),
                    out_path(cfg, "martingale.csv").c_str());
        return n_failed > 0 ? 3 : 0;
    });
}

int cmd_histogram(const RunConfig& config) {
    return run_config_checked(config, [](const RunConfig& cfg) {
        const ReductionModel model = model_from_config(cfg);
        const EnsembleResult ensemble =
            run_ensemble(model, cfg.n, params_from_config(cfg), cfg.seed, cfg.threads);
        SphereHistogram hist;
        try {
            hist = sphere_histogram(ensemble.records, cfg.z_bins, cfg.phi_bins);
        } catch (const NoDegenerateOutcomesError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }

        ensure_out_dir(cfg);
        write_file_atomic(out_path(cfg, "histogram.csv"), format_histogram_csv(hist));

        std::printf("wrote %d x %d bins (%lld degenerate outcomes) to %s\n", cfg.z_bins,
                    cfg.phi_bins, (long long)hist.total_count,
                    out_path(cfg, "histogram.csv").c_str());
        return ensemble.n_failed > 0 ? 3 : 0;
    });
}

}  // namespace spinreduce
