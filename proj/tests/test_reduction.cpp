#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "spinreduce/reduction.hpp"
#include "spinreduce/rng.hpp"

using namespace spinreduce;

namespace {

StateVector basis_state(int i) {
    Eigen::Vector4cd a = Eigen::Vector4cd::Zero();
    a(i) = 1.0;
    return StateVector(a);
}

// Step oracle on raw complex arrays, written independently of the engine:
// psi' = psi + [-iH - (1/8) sum s^2 (A - <A>)^2] psi dt
//            + sum (s/2)(A - <A>) psi dW, then renormalized.
using CVec = std::array<Complex, 4>;
using CMat = std::array<std::array<Complex, 4>, 4>;

CVec mat_vec(const CMat& m, const CVec& v) {
    CVec out{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out[r] += m[r][c] * v[c];
        }
    }
    return out;
}

double inner_real(const CVec& a, const CVec& b) {
    Complex s = 0.0;
    for (int i = 0; i < 4; ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s.real();
}

CVec oracle_step(const CVec& psi, const std::vector<CMat>& gens,
                 const std::vector<double>& sigmas, double dt,
                 const std::vector<double>& dw) {
    const CMat h = {{{1.0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, -1.0}}};
    CVec out = psi;
    const CVec hpsi = mat_vec(h, psi);
    for (int i = 0; i < 4; ++i) {
        out[i] += Complex(0.0, -1.0) * hpsi[i] * dt;
    }
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const CVec apsi = mat_vec(gens[k], psi);
        const double mean = inner_real(psi, apsi);
        CVec centered;
        for (int i = 0; i < 4; ++i) {
            centered[i] = apsi[i] - mean * psi[i];
        }
        const CVec centered2a = mat_vec(gens[k], centered);
        for (int i = 0; i < 4; ++i) {
            const Complex second = centered2a[i] - mean * centered[i];
            out[i] += -0.125 * sigmas[k] * sigmas[k] * second * dt;
            out[i] += 0.5 * sigmas[k] * dw[k] * centered[i];
        }
    }
    double norm = 0.0;
    for (int i = 0; i < 4; ++i) {
        norm += std::norm(out[i]);
    }
    norm = std::sqrt(norm);
    for (int i = 0; i < 4; ++i) {
        out[i] /= norm;
    }
    return out;
}

CMat to_cmat(const Observable& obs) {
    CMat out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            out[r][c] = obs.matrix()(r, c);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("validate_model accepts the built-in models") {
    CHECK_NOTHROW(validate_model(model_energy()));
    CHECK_NOTHROW(validate_model(model_local_spins()));
    for (const Observable& g : model_local_spins().generators) {
        CHECK(commutator_norm(g, hamiltonian()) == 0.0);
    }
}

TEST_CASE("validate_model rejects broken models") {
    CHECK_THROWS_AS(validate_model({{}, {}}), EmptyModelError);
    CHECK_THROWS_AS(validate_model({{s_squared(), sigma_1z()}, {1.0, 1.0}}),
                    NonCommutingError);
    CHECK_THROWS_AS(validate_model({{hamiltonian()}, {-1.0}}), ModelError);
    CHECK_THROWS_AS(validate_model({{hamiltonian()}, {1.0, 1.0}}), ModelError);
}

TEST_CASE("drift vanishes where it should") {
    const ReductionModel energy = model_energy();

    // Eigenstate: the reduction term is zero, only the phase rotation remains.
    const StateVector up_up = basis_state(0);
    const Eigen::Vector4cd d = drift(up_up, energy);
    CHECK((d - Complex(0.0, -1.0) * up_up.amplitudes()).norm() == 0.0);

    // The singlet is annihilated by H and has <H> = 0.
    const StateVector s = theta_phi_state({std::acos(-1.0) / 2.0, std::acos(-1.0)});
    CHECK(drift(s, energy).norm() < 1e-15);
}

TEST_CASE("drift reduction term matches the brute-force oracle") {
    const ReductionModel energy = model_energy();
    const StateVector psi = initial_state();
    const Eigen::Vector4cd full = drift(psi, energy);
    const Eigen::Vector4cd reduction =
        full - Complex(0.0, -1.0) * (hamiltonian().matrix() * psi.amplitudes());

    // <H> = 0 for the prepared state, so the term is -(1/8) H^2 psi.
    Eigen::Vector4cd expected;
    expected << Complex(-0.125 * 0.5), 0.0, 0.0, Complex(-0.125 * 0.5);
    CHECK((reduction - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("diffusion") {
    const ReductionModel energy = model_energy();
    CHECK(diffusion(basis_state(3), energy, 0).norm() == 0.0);

    const StateVector psi = initial_state();
    const Eigen::Vector4cd expected = 0.5 * (hamiltonian().matrix() * psi.amplitudes());
    CHECK((diffusion(psi, energy, 0) - expected).norm() == 0.0);

    // The centered form is orthogonal to the state.
    const Complex overlap = psi.amplitudes().dot(diffusion(psi, energy, 0));
    CHECK(std::abs(overlap) < 1e-15);

    CHECK_THROWS_AS(diffusion(psi, energy, 1), std::out_of_range);
}

TEST_CASE("step leaves eigenstate populations alone") {
    const ReductionModel energy = model_energy();
    const StateVector down_down = basis_state(3);
    const std::vector<double> noise{0.37};
    const StateVector next = step(down_down, energy, 1e-3, noise);
    // Pure phase rotation: population still concentrated on |dd>.
    CHECK(std::abs(std::norm(next.amplitude(3)) - 1.0) < 1e-12);
    CHECK(std::abs(next.amplitude(3) - std::polar(1.0, 1e-3)) < 1e-6);
}

TEST_CASE("step with zero noise and zero dt is the identity") {
    const ReductionModel energy = model_energy();
    const StateVector psi = initial_state();
    const std::vector<double> noise{0.0};
    const StateVector next = step(psi, energy, 0.0, noise);
    CHECK((next.amplitudes() - psi.amplitudes()).norm() == 0.0);
}

TEST_CASE("step matches an independent reimplementation") {
    for (const ReductionModel& model : {model_energy(), model_local_spins(0.7)}) {
        std::vector<CMat> gens;
        for (const Observable& g : model.generators) {
            gens.push_back(to_cmat(g));
        }

        CounterRng rng(2024);
        const double dt = 1e-3;
        std::vector<double> dw(model.generators.size());
        CVec oracle{0.5, 0.5, -0.5, 0.5};
        StateVector engine = initial_state();
        for (int i = 0; i < 25; ++i) {
            for (double& x : dw) {
                x = rng.normal() * std::sqrt(dt);
            }
            oracle = oracle_step(oracle, gens, model.couplings, dt, dw);
            engine = step(engine, model, dt, dw);
        }
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(engine.amplitude(i) - oracle[i]) < 1e-13);
        }
    }
}

TEST_CASE("step rejects a grossly oversized increment") {
    const ReductionModel energy = model_energy();
    const std::vector<double> huge{50.0};
    CHECK_THROWS_AS(step(initial_state(), energy, 1e-3, huge), StepError);
}

TEST_CASE("step checks the noise width") {
    const std::vector<double> noise{0.0};
    CHECK_THROWS_AS(step(initial_state(), model_local_spins(), 1e-3, noise),
                    std::invalid_argument);
}

TEST_CASE("norm is preserved through many steps") {
    const ReductionModel model = model_local_spins();
    CounterRng rng(5);
    StateVector psi = initial_state();
    const double dt = 1e-2;
    std::vector<double> dw(2);
    for (int i = 0; i < 2000; ++i) {
        for (double& x : dw) {
            x = rng.normal() * std::sqrt(dt);
        }
        // Pre-renormalization deviation stays O(dt).
        const Eigen::Vector4cd raw = psi.amplitudes() + drift(psi, model) * dt +
                                     diffusion(psi, model, 0) * dw[0] +
                                     diffusion(psi, model, 1) * dw[1];
        CHECK(std::abs(raw.norm() - 1.0) < 10.0 * dt);
        psi = step(psi, model, dt, dw);
        CHECK(std::abs(psi.amplitudes().norm() - 1.0) < 1e-14);
    }
}

TEST_CASE("run_trajectory collapses an eigenstate immediately") {
    const Trajectory traj = run_trajectory(basis_state(0), model_energy(), {}, 7);
    CHECK(traj.collapsed);
    CHECK(traj.steps_taken == 0);
    const Complex overlap = traj.final_state.amplitudes().dot(basis_state(0).amplitudes());
    CHECK(std::abs(std::norm(overlap) - 1.0) < 1e-10);
}

TEST_CASE("run_trajectory reaches an energy eigenvalue from the prepared state") {
    SimulationParams params;
    params.snapshot_count = 0;
    const Trajectory traj = run_trajectory(initial_state(), model_energy(), params, 11);
    REQUIRE(traj.collapsed);
    const double e = expectation(traj.final_state, hamiltonian());
    const double nearest = std::round(e);
    CHECK(std::abs(e - nearest) < 1e-5);
    CHECK(std::abs(nearest) <= 1.0);
}

TEST_CASE("run_trajectory is deterministic in the seed") {
    SimulationParams params;
    params.max_steps = 2000;
    params.collapse_tol = 1e-30;  // force the full horizon
    params.snapshot_count = 10;
    const Trajectory a = run_trajectory(initial_state(), model_local_spins(), params, 123);
    const Trajectory b = run_trajectory(initial_state(), model_local_spins(), params, 123);
    CHECK(a.collapsed == b.collapsed);
    CHECK(a.steps_taken == b.steps_taken);
    CHECK(a.final_state.amplitudes() == b.final_state.amplitudes());
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].time == b.snapshots[i].time);
        CHECK(a.snapshots[i].energy_mean == b.snapshots[i].energy_mean);
        CHECK(a.snapshots[i].energy_variance == b.snapshots[i].energy_variance);
        CHECK(a.snapshots[i].total_generator_variance == b.snapshots[i].total_generator_variance);
    }

    const Trajectory c = run_trajectory(initial_state(), model_local_spins(), params, 124);
    CHECK(a.final_state.amplitudes() != c.final_state.amplitudes());
}

TEST_CASE("run_trajectory composes the public step function") {
    SimulationParams params;
    params.max_steps = 50;
    params.collapse_tol = 1e-30;
    params.snapshot_count = 0;
    const std::uint64_t seed = 31415;
    const ReductionModel model = model_local_spins();
    const Trajectory traj = run_trajectory(initial_state(), model, params, seed);

    CounterRng rng(seed);
    StateVector psi = initial_state();
    std::vector<double> dw(2);
    const double sqrt_dt = std::sqrt(params.dt);
    for (int i = 0; i < 50; ++i) {
        for (double& x : dw) {
            x = rng.normal() * sqrt_dt;
        }
        psi = step(psi, model, params.dt, dw);
    }
    CHECK(traj.final_state.amplitudes() == psi.amplitudes());
    CHECK(traj.steps_taken == 50);
    CHECK_FALSE(traj.collapsed);
}

TEST_CASE("joint eigenstates are absorbing") {
    SimulationParams params;
    params.max_steps = 1000;
    params.collapse_tol = 1e-30;
    params.snapshot_count = 0;
    const Trajectory traj = run_trajectory(basis_state(1), model_local_spins(), params, 9);
    const double population = std::norm(traj.final_state.amplitude(1));
    CHECK(std::abs(population - 1.0) < 1e-8);
}

TEST_CASE("classify_energy") {
    CHECK(classify_energy(basis_state(0), 1e-9) == 1);
    CHECK(classify_energy(basis_state(3), 1e-9) == -1);
    const StateVector s = theta_phi_state({std::acos(-1.0) / 2.0, std::acos(-1.0)});
    CHECK(classify_energy(s, 1e-9) == 0);
    CHECK_THROWS_AS(classify_energy(initial_state(), 1e-9), NotCollapsedError);
}

TEST_CASE("martingale statistics of a small ensemble") {
    SimulationParams params;
    params.max_steps = 20000;
    params.snapshot_count = 20;
    std::vector<Trajectory> trajectories;
    for (int i = 0; i < 200; ++i) {
        trajectories.push_back(run_trajectory(initial_state(), model_local_spins(), params,
                                              derive_trajectory_seed(777, i)));
    }
    const auto means = martingale_statistics(trajectories, MartingaleQuantity::EnergyMean);
    const auto vars = martingale_statistics(trajectories, MartingaleQuantity::EnergyVariance);
    REQUIRE(means.size() == 21);
    REQUIRE(vars.size() == 21);

    // <H> starts at 0 and stays there in ensemble mean.
    CHECK(means[0].mean == 0.0);
    CHECK(means[0].se == 0.0);
    for (const SeriesPoint& p : means) {
        CHECK(std::abs(p.mean) <= 4.0 * p.se + 1e-12);
    }

    // Var(H) starts at exactly 1/2 and decreases on average.
    CHECK(vars[0].mean == 0.5);
    CHECK(vars[0].se == 0.0);
    for (std::size_t j = 1; j < vars.size(); ++j) {
        CHECK(vars[j].mean <=
              vars[j - 1].mean + 2.0 * std::sqrt(vars[j].se * vars[j].se +
                                                 vars[j - 1].se * vars[j - 1].se) + 1e-12);
    }
    CHECK(vars.back().mean < vars.front().mean);
}

TEST_CASE("martingale statistics rejects mixed schedules") {
    SimulationParams a;
    a.max_steps = 1000;
    a.snapshot_count = 4;
    SimulationParams b = a;
    b.max_steps = 2000;
    std::vector<Trajectory> mixed = {
        run_trajectory(initial_state(), model_energy(), a, 1),
        run_trajectory(initial_state(), model_energy(), b, 2),
    };
    CHECK_THROWS_AS(martingale_statistics(mixed, MartingaleQuantity::EnergyMean),
                    ScheduleMismatchError);
}
