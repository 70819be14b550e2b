#pragma once

#include <span>
#include <string>

#include "spinreduce/experiment.hpp"

namespace spinreduce {

struct RunConfig {
    std::string model = "energy";  // energy | local-spins | custom
    std::string custom_generators;  // JSON path, required iff model == custom
    double sigma = 1.0;
    std::int64_t n = 10000;
    double dt = 1e-3;
    double collapse_tol = 1e-10;
    std::int64_t max_steps = 10'000'000;
    std::uint64_t seed = 1;
    int snapshots = 50;
    int z_bins = 20;
    int phi_bins = 36;
    int threads = 0;  // 0: SPINREDUCE_THREADS env or the OpenMP default
    std::string out_dir = ".";
};

/// Throws ConfigError on out-of-range values or a missing custom model path.
void validate_config(const RunConfig& config);

/// Resolves the configured model; throws ConfigError for unknown names or an
/// unloadable custom model file.
ReductionModel model_from_config(const RunConfig& config);

SimulationParams params_from_config(const RunConfig& config);

// File formats. All floats are written with 17 significant digits so values
// round-trip exactly; identical inputs give byte-identical files.
std::string format_report_json(const RunConfig& config, const EnsembleReport& report,
                               std::span<const LudersOutcome> luders);
std::string format_records_csv(std::span<const OutcomeRecord> records);
std::string format_martingale_csv(std::span<const SeriesPoint> energy,
                                  std::span<const SeriesPoint> variance);
std::string format_histogram_csv(const SphereHistogram& hist);

/// Custom model file: {"generators": [G...], "couplings": [s...]} where each
/// G is a 4x4 row-major matrix of [re, im] pairs. The loaded model must pass
/// validate_model.
ReductionModel load_custom_model(const std::string& path);

/// Writes content to path via a temporary file and rename, so readers never
/// observe a partial file. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

// Subcommand drivers. Return the process exit code: 0 success, 1 config
// error, 2 I/O error, 3 when uncollapsed trajectories were excluded.
int cmd_discriminate(const RunConfig& config);
int cmd_martingale(const RunConfig& config);
int cmd_histogram(const RunConfig& config);

}  // namespace spinreduce
