#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spinreduce/reduction.hpp"

namespace spinreduce {

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct OutcomeRecord {
    int eigenvalue;                           // +1, 0 or -1
    StateVector final_state;
    std::optional<SphereCoordinates> sphere;  // present iff eigenvalue == 0
    std::uint64_t seed;
    std::int64_t steps;
};

struct EnsembleResult {
    std::vector<OutcomeRecord> records;  // trajectory-index order, failures excluded
    std::int64_t n_failed = 0;           // trajectories that hit max_steps uncollapsed
};

/// Worker count: an explicit request > 0 wins, then the SPINREDUCE_THREADS
/// environment variable, then the OpenMP default (1 without OpenMP).
int resolve_thread_count(int requested);

/// Runs n independent trajectories, member i seeded by
/// derive_trajectory_seed(master_seed, i). The loop is OpenMP-parallel;
/// results are stored by index and so do not depend on scheduling.
std::vector<Trajectory> run_trajectories(const StateVector& initial,
                                         const ReductionModel& model, std::int64_t n,
                                         const SimulationParams& params,
                                         std::uint64_t master_seed, int threads = 0);

/// Serial reference for run_trajectories: same seeding, plain loop. Kept for
/// testing and benchmarking the parallel path against.
std::vector<Trajectory> run_trajectories_reference(const StateVector& initial,
                                                   const ReductionModel& model,
                                                   std::int64_t n,
                                                   const SimulationParams& params,
                                                   std::uint64_t master_seed);

/// The full measurement ensemble: n trajectories from the prepared initial
/// state, each classified by energy eigenvalue; eigenvalue-0 outcomes carry
/// the sphere coordinates of their zero-energy projection. Trajectories that
/// fail to collapse are excluded from the records and counted in n_failed.
EnsembleResult run_ensemble(const ReductionModel& model, std::int64_t n,
                            const SimulationParams& params, std::uint64_t master_seed,
                            int threads = 0);

/// run_ensemble on top of the serial reference runner.
EnsembleResult run_ensemble_reference(const ReductionModel& model, std::int64_t n,
                                      const SimulationParams& params,
                                      std::uint64_t master_seed);

/// Mean of cos^2(theta/2) over eigenvalue-0 records: the Monte Carlo estimate
/// of the probability that a subsequent first-spin measurement finds |ud>.
/// Throws NoDegenerateOutcomesError if no such records exist.
Estimate estimate_p(std::span<const OutcomeRecord> records);

/// Mean of <Sigma_1z> over all records: the terminal side of the weak
/// conservation law, zero for the prepared initial state.
Estimate conservation_check(std::span<const OutcomeRecord> records);

/// Mean of <S^2> over eigenvalue-0 records: the discriminating statistic.
/// Zero iff the degenerate outcomes are all singlet.
Estimate s_squared_statistic(std::span<const OutcomeRecord> records);

struct LudersOutcome {
    int eigenvalue;
    double probability;
    StateVector state;
};

/// Projection-postulate outcome table for an energy measurement on `initial`:
/// probability = squared norm of the eigenspace projection, post-measurement
/// state = normalized projection. Outcomes whose projection norm is below
/// 1e-12 are excluded (they occur with probability 0).
std::vector<LudersOutcome> luders_reference(const StateVector& initial);

/// Equal-area histogram over the zero-energy sphere, uniform in
/// (cos theta, phi). Bin (i, j) covers [z_edge(i), z_edge(i+1)) x
/// [phi_edge(j), phi_edge(j+1)), with the closed upper edge at cos theta = 1.
struct SphereHistogram {
    int n_z_bins = 0;
    int n_phi_bins = 0;
    std::vector<std::int64_t> counts;  // row-major over (z bin, phi bin)
    std::int64_t total_count = 0;

    double z_edge(int i) const { return -1.0 + 2.0 * double(i) / double(n_z_bins); }
    double phi_edge(int j) const;
    std::int64_t count(int i, int j) const { return counts[std::size_t(i) * n_phi_bins + j]; }
};

SphereHistogram sphere_histogram(std::span<const OutcomeRecord> records, int n_z_bins,
                                 int n_phi_bins);

struct OutcomeStat {
    double frequency = 0.0;
    double se = 0.0;  // binomial
    std::int64_t count = 0;
};

struct EnsembleReport {
    OutcomeStat freq_plus;
    OutcomeStat freq_zero;
    OutcomeStat freq_minus;
    Estimate p_hat;         // NaN if no degenerate outcomes
    Estimate conservation;
    Estimate s2;            // NaN if no degenerate outcomes
    std::int64_t n_total = 0;
    std::int64_t n_degenerate = 0;
    std::int64_t n_failed = 0;
};

EnsembleReport make_report(const EnsembleResult& ensemble);

}  // namespace spinreduce
