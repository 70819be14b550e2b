#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spinreduce/qstate.hpp"

namespace spinreduce {

/// A norm-preserving stochastic reduction model: a family of mutually
/// commuting Hermitian generators, each commuting with the Hamiltonian, with
/// one positive coupling per generator. The state evolves under
///
///   dpsi = [-iH - (1/8) sum_k s_k^2 (A_k - <A_k>)^2] psi dt
///          + sum_k (s_k/2) (A_k - <A_k>) psi dW_k
///
/// which preserves the norm, keeps expectations of observables commuting with
/// every generator as martingales, and drives the generator variances to zero.
struct ReductionModel {
    std::vector<Observable> generators;
    std::vector<double> couplings;
};

/// Throws EmptyModelError, NonCommutingError or ModelError if the model
/// violates its invariants.
void validate_model(const ReductionModel& model);

/// Reduction driven by the energy alone.
ReductionModel model_energy(double sigma = 1.0);

/// Reduction driven by the two single-particle z spins.
ReductionModel model_local_spins(double sigma = 1.0);

struct SimulationParams {
    double dt = 1e-3;
    double collapse_tol = 1e-10;  // threshold on the total generator variance
    std::int64_t max_steps = 10'000'000;
    int snapshot_count = 50;
};

struct Snapshot {
    double time;
    double energy_mean;
    double energy_variance;
    double total_generator_variance;
};

struct Trajectory {
    StateVector final_state;
    bool collapsed = false;
    std::int64_t steps_taken = 0;
    std::vector<Snapshot> snapshots;
    std::uint64_t seed = 0;
};

/// Deterministic part of the state increment, per unit time.
Eigen::Vector4cd drift(const StateVector& state, const ReductionModel& model);

/// Noise coefficient vector of generator k; throws std::out_of_range for a
/// bad index.
Eigen::Vector4cd diffusion(const StateVector& state, const ReductionModel& model, int k);

/// Sum of the generator variances at `state`. The collapse criterion is that
/// this falls below collapse_tol, which for a multi-generator model demands a
/// joint eigenstate.
double total_generator_variance(const StateVector& state, const ReductionModel& model);

/// One Euler-Maruyama step followed by renormalization. `noise` holds one
/// Wiener increment per generator, each drawn as Normal(0, dt). Throws
/// StepError if the pre-renormalization norm deviates from 1 by more than
/// 0.5, which signals a grossly oversized dt.
StateVector step(const StateVector& state, const ReductionModel& model, double dt,
                 std::span<const double> noise);

/// Runs the reduction process from `initial` until the total generator
/// variance drops below params.collapse_tol or max_steps is reached (in which
/// case collapsed is false). The noise stream is fully determined by `seed`,
/// so identical arguments give bit-identical trajectories.
///
/// Snapshots are recorded on the fixed step grid k * (max_steps /
/// snapshot_count), k = 0 .. snapshot_count. If the trajectory stops early
/// the terminal values fill the remaining grid slots; a collapsed state is
/// stationary apart from a global phase, so this is the exact continuation.
Trajectory run_trajectory(const StateVector& initial, const ReductionModel& model,
                          const SimulationParams& params, std::uint64_t seed);

/// Nearest energy eigenvalue (+1, 0 or -1) to <H>. Requires the energy
/// variance to be below tol; throws NotCollapsedError otherwise.
int classify_energy(const StateVector& state, double tol);

struct SeriesPoint {
    double time;
    double mean;
    double se;
};

enum class MartingaleQuantity { EnergyMean, EnergyVariance };

/// Per-snapshot ensemble mean and standard error of the requested quantity.
/// All trajectories must share the same snapshot schedule
/// (ScheduleMismatchError otherwise).
std::vector<SeriesPoint> martingale_statistics(std::span<const Trajectory> trajectories,
                                               MartingaleQuantity which);

}  // namespace spinreduce
