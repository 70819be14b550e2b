#pragma once

#include <stdexcept>

namespace spinreduce {

// Amplitudes too far from unit norm to accept as a state.
struct NormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix is not Hermitian, or an expectation value came out complex.
struct HermiticityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State has weight outside the zero-energy subspace.
struct SubspaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reduction model violates one of its invariants.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyModelError : ModelError {
    using ModelError::ModelError;
};

struct NonCommutingError : ModelError {
    using ModelError::ModelError;
};

// Pre-renormalization norm drifted grossly; the time step is too large.
struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Energy variance too large to assign an eigenvalue.
struct NotCollapsedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectories do not share a snapshot schedule.
struct ScheduleMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoDegenerateOutcomesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyEnsembleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spinreduce
