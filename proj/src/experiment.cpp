#include "spinreduce/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinreduce/rng.hpp"

namespace spinreduce {

namespace {

constexpr double kLudersCutoff = 1e-12;

// Lower bound on the classification tolerance. At the default collapse
// tolerance the energy variance at termination is orders of magnitude below
// this; with a loosened collapse_tol the classification loosens with it.
constexpr double kMinClassifyTol = 1e-6;

Estimate mean_and_se(const std::vector<double>& values) {
    const double n = double(values.size());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / n;
    if (values.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

OutcomeRecord to_record(const Trajectory& traj, double classify_tol) {
    const int eigenvalue = classify_energy(traj.final_state, classify_tol);
    std::optional<SphereCoordinates> sphere;
    if (eigenvalue == 0) {
        // Sphere coordinates describe the zero-energy projection; the raw
        // terminal state keeps its (sub-collapse-tol) residuals.
        Eigen::Vector4cd proj = Eigen::Vector4cd::Zero();
        proj(1) = traj.final_state.amplitude(1);
        proj(2) = traj.final_state.amplitude(2);
        sphere = bloch_coordinates(StateVector(proj));
    }
    return {eigenvalue, traj.final_state, sphere, traj.seed, traj.steps_taken};
}

EnsembleResult collect_records(const std::vector<Trajectory>& trajectories,
                               double collapse_tol) {
    const double classify_tol = std::max(kMinClassifyTol, collapse_tol);
    EnsembleResult out;
    out.records.reserve(trajectories.size());
    for (const Trajectory& traj : trajectories) {
        if (!traj.collapsed) {
            ++out.n_failed;
            continue;
        }
        out.records.push_back(to_record(traj, classify_tol));
    }
    return out;
}

}  // namespace

int resolve_thread_count(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("SPINREDUCE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<Trajectory> run_trajectories(const StateVector& initial,
                                         const ReductionModel& model, std::int64_t n,
                                         const SimulationParams& params,
                                         std::uint64_t master_seed, int threads) {
    validate_model(model);
    if (n < 1) {
        throw std::invalid_argument("ensemble size must be at least 1");
    }
    std::vector<std::optional<Trajectory>> slots(static_cast<std::size_t>(n));
    std::exception_ptr failure;
    const int n_threads = resolve_thread_count(threads);
    (void)n_threads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(n_threads)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            slots[std::size_t(i)] = run_trajectory(
                initial, model, params, derive_trajectory_seed(master_seed, std::uint64_t(i)));
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<Trajectory> out;
    out.reserve(std::size_t(n));
    for (auto& slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

std::vector<Trajectory> run_trajectories_reference(const StateVector& initial,
                                                   const ReductionModel& model,
                                                   std::int64_t n,
                                                   const SimulationParams& params,
                                                   std::uint64_t master_seed) {
    validate_model(model);
    if (n < 1) {
        throw std::invalid_argument("ensemble size must be at least 1");
    }
    std::vector<Trajectory> out;
    out.reserve(std::size_t(n));
    for (std::int64_t i = 0; i < n; ++i) {
        out.push_back(run_trajectory(initial, model, params,
                                     derive_trajectory_seed(master_seed, std::uint64_t(i))));
    }
    return out;
}

EnsembleResult run_ensemble(const ReductionModel& model, std::int64_t n,
                            const SimulationParams& params, std::uint64_t master_seed,
                            int threads) {
    SimulationParams run_params = params;
    run_params.snapshot_count = 0;  // records carry no time series
    const auto trajectories =
        run_trajectories(initial_state(), model, n, run_params, master_seed, threads);
    return collect_records(trajectories, params.collapse_tol);
}

EnsembleResult run_ensemble_reference(const ReductionModel& model, std::int64_t n,
                                      const SimulationParams& params,
                                      std::uint64_t master_seed) {
    SimulationParams run_params = params;
    run_params.snapshot_count = 0;
    const auto trajectories =
        run_trajectories_reference(initial_state(), model, n, run_params, master_seed);
    return collect_records(trajectories, params.collapse_tol);
}

Estimate estimate_p(std::span<const OutcomeRecord> records) {
    std::vector<double> values;
    for (const OutcomeRecord& r : records) {
        if (r.sphere) {
            const double c = std::cos(0.5 * r.sphere->theta);
            values.push_back(c * c);
        }
    }
    if (values.empty()) {
        throw NoDegenerateOutcomesError("no eigenvalue-0 records");
    }
    return mean_and_se(values);
}

Estimate conservation_check(std::span<const OutcomeRecord> records) {
    if (records.empty()) {
        throw EmptyEnsembleError("no records");
    }
    const Observable sigma = sigma_1z();
    std::vector<double> values;
    values.reserve(records.size());
    for (const OutcomeRecord& r : records) {
        values.push_back(expectation(r.final_state, sigma));
    }
    return mean_and_se(values);
}

Estimate s_squared_statistic(std::span<const OutcomeRecord> records) {
    const Observable s2 = s_squared();
    std::vector<double> values;
    for (const OutcomeRecord& r : records) {
        if (r.eigenvalue == 0) {
            values.push_back(expectation(r.final_state, s2));
        }
    }
    if (values.empty()) {
        throw NoDegenerateOutcomesError("no eigenvalue-0 records");
    }
    return mean_and_se(values);
}

std::vector<LudersOutcome> luders_reference(const StateVector& initial) {
    const Eigen::Vector4cd& a = initial.amplitudes();
    std::vector<LudersOutcome> out;
    const auto add = [&out](int eigenvalue, const Eigen::Vector4cd& projection) {
        const double p = projection.squaredNorm();
        if (projection.norm() < kLudersCutoff) {
            return;  // excluded: the outcome has probability 0
        }
        out.push_back({eigenvalue, p, StateVector(projection)});
    };
    add(+1, Eigen::Vector4cd(a(0), 0, 0, 0));
    add(0, Eigen::Vector4cd(0, a(1), a(2), 0));
    add(-1, Eigen::Vector4cd(0, 0, 0, a(3)));
    return out;
}

double SphereHistogram::phi_edge(int j) const {
    return 2.0 * std::numbers::pi * double(j) / double(n_phi_bins);
}

SphereHistogram sphere_histogram(std::span<const OutcomeRecord> records, int n_z_bins,
                                 int n_phi_bins) {
    if (n_z_bins < 1 || n_phi_bins < 1) {
        throw std::invalid_argument("bin counts must be at least 1");
    }
    SphereHistogram hist;
    hist.n_z_bins = n_z_bins;
    hist.n_phi_bins = n_phi_bins;
    hist.counts.assign(std::size_t(n_z_bins) * std::size_t(n_phi_bins), 0);
    for (const OutcomeRecord& r : records) {
        if (!r.sphere) {
            continue;
        }
        const double z = std::cos(r.sphere->theta);
        int iz = int(std::floor((z + 1.0) / 2.0 * n_z_bins));
        iz = std::min(std::max(iz, 0), n_z_bins - 1);
        int jp = int(std::floor(r.sphere->phi / (2.0 * std::numbers::pi) * n_phi_bins));
        jp = std::min(std::max(jp, 0), n_phi_bins - 1);
        ++hist.counts[std::size_t(iz) * n_phi_bins + jp];
        ++hist.total_count;
    }
    if (hist.total_count == 0) {
        throw NoDegenerateOutcomesError("no eigenvalue-0 records");
    }
    return hist;
}

EnsembleReport make_report(const EnsembleResult& ensemble) {
    EnsembleReport report;
    report.n_total = std::int64_t(ensemble.records.size());
    report.n_failed = ensemble.n_failed;
    if (report.n_total == 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.p_hat = report.conservation = report.s2 = {nan, nan};
        return report;
    }

    const auto stat = [&](std::int64_t count) -> OutcomeStat {
        const double n = double(report.n_total);
        const double f = double(count) / n;
        return {f, std::sqrt(f * (1.0 - f) / n), count};
    };
    std::int64_t n_plus = 0;
    std::int64_t n_zero = 0;
    std::int64_t n_minus = 0;
    for (const OutcomeRecord& r : ensemble.records) {
        if (r.eigenvalue > 0) {
            ++n_plus;
        } else if (r.eigenvalue < 0) {
            ++n_minus;
        } else {
            ++n_zero;
        }
    }
    report.freq_plus = stat(n_plus);
    report.freq_zero = stat(n_zero);
    report.freq_minus = stat(n_minus);
    report.n_degenerate = n_zero;

    report.conservation = conservation_check(ensemble.records);
    if (n_zero > 0) {
        report.p_hat = estimate_p(ensemble.records);
        report.s2 = s_squared_statistic(ensemble.records);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.p_hat = {nan, nan};
        report.s2 = {nan, nan};
    }
    return report;
}

}  // namespace spinreduce
