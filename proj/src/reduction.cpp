#include "spinreduce/reduction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinreduce/rng.hpp"

namespace spinreduce {

namespace {

constexpr double kCommuteTol = 1e-10;
constexpr double kMaxPrenormDeviation = 0.5;

const Eigen::Matrix4cd& hamiltonian_matrix() {
    static const Eigen::Matrix4cd h = hamiltonian().matrix();
    return h;
}

struct StepEval {
    Eigen::Vector4cd candidate;  // pre-renormalization
    double input_total_variance;
    double prenorm_deviation;
};

// Shared by step() and the trajectory loop so both produce identical
// arithmetic. Returns the total generator variance of the *input* state,
// which the caller gets for free from the centered vectors. The candidate is
// left unnormalized; both callers normalize exactly once through the
// StateVector constructor.
StepEval eval_step(const Eigen::Vector4cd& psi, const ReductionModel& model, double dt,
                   std::span<const double> noise) {
    if (noise.size() != model.generators.size()) {
        throw std::invalid_argument("need one noise increment per generator");
    }
    const Eigen::Matrix4cd& h = hamiltonian_matrix();
    Eigen::Vector4cd drift_acc = Complex(0.0, -1.0) * (h * psi);
    Eigen::Vector4cd noise_acc = Eigen::Vector4cd::Zero();
    double total_var = 0.0;
    for (std::size_t k = 0; k < model.generators.size(); ++k) {
        const Eigen::Matrix4cd& a = model.generators[k].matrix();
        const double sigma = model.couplings[k];
        const Eigen::Vector4cd w = a * psi;
        const double mean = psi.dot(w).real();
        const Eigen::Vector4cd centered = w - mean * psi;
        total_var += centered.squaredNorm();
        drift_acc.noalias() += (-0.125 * sigma * sigma) * (a * centered - mean * centered);
        noise_acc += (0.5 * sigma * noise[k]) * centered;
    }
    Eigen::Vector4cd cand = psi + dt * drift_acc + noise_acc;
    return {cand, total_var, std::abs(cand.norm() - 1.0)};
}

}  // namespace

void validate_model(const ReductionModel& model) {
    if (model.generators.empty()) {
        throw EmptyModelError("model has no generators");
    }
    if (model.couplings.size() != model.generators.size()) {
        throw ModelError("expected one coupling per generator");
    }
    for (double sigma : model.couplings) {
        if (!(sigma > 0.0)) {
            throw ModelError("couplings must be positive");
        }
    }
    const Observable h = hamiltonian();
    for (std::size_t k = 0; k < model.generators.size(); ++k) {
        if (commutator_norm(model.generators[k], h) >= kCommuteTol) {
            throw NonCommutingError("generator " + std::to_string(k) +
                                    " does not commute with the Hamiltonian");
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (commutator_norm(model.generators[j], model.generators[k]) >= kCommuteTol) {
                throw NonCommutingError("generators " + std::to_string(j) + " and " +
                                        std::to_string(k) + " do not commute");
            }
        }
    }
}

ReductionModel model_energy(double sigma) {
    return {{hamiltonian()}, {sigma}};
}

ReductionModel model_local_spins(double sigma) {
    Eigen::Matrix4cd s2z = Eigen::Matrix4cd::Zero();
    s2z(0, 0) = 1.0;
    s2z(1, 1) = -1.0;
    s2z(2, 2) = 1.0;
    s2z(3, 3) = -1.0;
    return {{sigma_1z(), Observable(s2z)}, {sigma, sigma}};
}

Eigen::Vector4cd drift(const StateVector& state, const ReductionModel& model) {
    const Eigen::Vector4cd& psi = state.amplitudes();
    Eigen::Vector4cd out = Complex(0.0, -1.0) * (hamiltonian_matrix() * psi);
    for (std::size_t k = 0; k < model.generators.size(); ++k) {
        const Eigen::Matrix4cd& a = model.generators[k].matrix();
        const double sigma = model.couplings[k];
        const Eigen::Vector4cd centered = a * psi - expectation(state, model.generators[k]) * psi;
        out.noalias() += (-0.125 * sigma * sigma) *
                         (a * centered - expectation(state, model.generators[k]) * centered);
    }
    return out;
}

Eigen::Vector4cd diffusion(const StateVector& state, const ReductionModel& model, int k) {
    if (k < 0 || std::size_t(k) >= model.generators.size()) {
        throw std::out_of_range("generator index " + std::to_string(k) + " out of range");
    }
    const Eigen::Vector4cd& psi = state.amplitudes();
    const Observable& a = model.generators[k];
    return (0.5 * model.couplings[k]) * (a.matrix() * psi - expectation(state, a) * psi);
}

double total_generator_variance(const StateVector& state, const ReductionModel& model) {
    double total = 0.0;
    for (const Observable& a : model.generators) {
        total += variance(state, a);
    }
    return total;
}

StateVector step(const StateVector& state, const ReductionModel& model, double dt,
                 std::span<const double> noise) {
    const StepEval ev = eval_step(state.amplitudes(), model, dt, noise);
    if (ev.prenorm_deviation > kMaxPrenormDeviation) {
        throw StepError("pre-renormalization norm deviated by " +
                        std::to_string(ev.prenorm_deviation) + "; reduce dt");
    }
    return StateVector(ev.candidate);
}

Trajectory run_trajectory(const StateVector& initial, const ReductionModel& model,
                          const SimulationParams& params, std::uint64_t seed) {
    if (!(params.dt > 0.0) || !(params.collapse_tol > 0.0) || params.max_steps < 1 ||
        params.snapshot_count < 0) {
        throw std::invalid_argument("invalid simulation parameters");
    }
    validate_model(model);

    const std::int64_t stride =
        params.snapshot_count > 0
            ? std::max<std::int64_t>(1, params.max_steps / params.snapshot_count)
            : 0;

    Trajectory out{initial, false, 0, {}, seed};
    if (params.snapshot_count > 0) {
        out.snapshots.reserve(std::size_t(params.snapshot_count) + 1);
    }

    CounterRng rng(seed);
    const double sqrt_dt = std::sqrt(params.dt);
    std::vector<double> noise(model.generators.size());
    StateVector state = initial;

    int next_snap = 0;
    std::int64_t s = 0;
    while (true) {
        for (double& dw : noise) {
            dw = rng.normal() * sqrt_dt;
        }
        const StepEval ev = eval_step(state.amplitudes(), model, params.dt, noise);

        if (stride > 0 && next_snap <= params.snapshot_count &&
            s == std::int64_t(next_snap) * stride) {
            out.snapshots.push_back({double(s) * params.dt,
                                     expectation(state, hamiltonian()),
                                     variance(state, hamiltonian()),
                                     ev.input_total_variance});
            ++next_snap;
        }
        if (ev.input_total_variance < params.collapse_tol) {
            out.collapsed = true;
            break;
        }
        if (s == params.max_steps) {
            break;
        }
        if (ev.prenorm_deviation > kMaxPrenormDeviation) {
            throw StepError("pre-renormalization norm deviated by " +
                            std::to_string(ev.prenorm_deviation) + "; reduce dt");
        }
        state = StateVector(ev.candidate);
        ++s;
    }

    out.final_state = state;
    out.steps_taken = s;

    // Terminal values carry forward over the unused part of the snapshot grid.
    if (stride > 0 && next_snap <= params.snapshot_count) {
        const double energy_mean = expectation(out.final_state, hamiltonian());
        const double energy_var = variance(out.final_state, hamiltonian());
        const double total_var = total_generator_variance(out.final_state, model);
        for (; next_snap <= params.snapshot_count; ++next_snap) {
            out.snapshots.push_back({double(next_snap) * double(stride) * params.dt,
                                     energy_mean, energy_var, total_var});
        }
    }
    return out;
}

int classify_energy(const StateVector& state, double tol) {
    const double var = variance(state, hamiltonian());
    if (!(var < tol)) {
        throw NotCollapsedError("energy variance " + std::to_string(var) +
                                " is not below " + std::to_string(tol));
    }
    const double mean = expectation(state, hamiltonian());
    if (mean > 0.5) {
        return 1;
    }
    if (mean < -0.5) {
        return -1;
    }
    return 0;
}

std::vector<SeriesPoint> martingale_statistics(std::span<const Trajectory> trajectories,
                                               MartingaleQuantity which) {
    if (trajectories.empty()) {
        throw EmptyEnsembleError("no trajectories");
    }
    const std::size_t n_snap = trajectories.front().snapshots.size();
    for (const Trajectory& t : trajectories) {
        if (t.snapshots.size() != n_snap) {
            throw ScheduleMismatchError("trajectories have different snapshot counts");
        }
        for (std::size_t j = 0; j < n_snap; ++j) {
            if (t.snapshots[j].time != trajectories.front().snapshots[j].time) {
                throw ScheduleMismatchError("trajectories have different snapshot times");
            }
        }
    }
    const double n = double(trajectories.size());
    std::vector<SeriesPoint> out(n_snap);
    for (std::size_t j = 0; j < n_snap; ++j) {
        double sum = 0.0;
        for (const Trajectory& t : trajectories) {
            const Snapshot& s = t.snapshots[j];
            sum += which == MartingaleQuantity::EnergyMean ? s.energy_mean : s.energy_variance;
        }
        const double mean = sum / n;
        double ss = 0.0;
        for (const Trajectory& t : trajectories) {
            const Snapshot& s = t.snapshots[j];
            const double v =
                which == MartingaleQuantity::EnergyMean ? s.energy_mean : s.energy_variance;
            ss += (v - mean) * (v - mean);
        }
        const double se =
            trajectories.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
        out[j] = {trajectories.front().snapshots[j].time, mean, se};
    }
    return out;
}

}  // namespace spinreduce
