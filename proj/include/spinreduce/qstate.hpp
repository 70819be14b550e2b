#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "spinreduce/errors.hpp"

namespace spinreduce {

using Complex = std::complex<double>;

// Basis order of the two-spin product space, fixed everywhere in this
// library:
//   0: |up,up>    1: |up,down>    2: |down,up>    3: |down,down>

/// Normalized pure state of the two-spin system. The constructor rescales to
/// unit norm; use make_state() for norm-checked construction from raw input.
class StateVector {
public:
    explicit StateVector(const Eigen::Vector4cd& amplitudes);

    const Eigen::Vector4cd& amplitudes() const { return amps_; }
    Complex amplitude(int i) const { return amps_(i); }

private:
    Eigen::Vector4cd amps_;
};

/// Hermitian operator on the two-spin space. Construction rejects matrices
/// that deviate from their conjugate transpose by more than 1e-12 per entry.
class Observable {
public:
    explicit Observable(const Eigen::Matrix4cd& matrix);

    const Eigen::Matrix4cd& matrix() const { return m_; }

private:
    Eigen::Matrix4cd m_;
};

/// Point on the zero-energy sphere: theta in [0, pi], phi in [0, 2*pi).
/// phi is 0 by convention at the poles, where the parameterization is
/// singular.
struct SphereCoordinates {
    double theta = 0.0;
    double phi = 0.0;
};

/// Checked construction: the input norm must be within 1e-6 of 1
/// (NormError otherwise); the result is renormalized exactly.
StateVector make_state(const std::array<Complex, 4>& amplitudes);
StateVector make_state(Complex a_uu, Complex a_ud, Complex a_du, Complex a_dd);

/// The state the experiment prepares: (|uu> + |ud> - |du> + |dd>) / 2.
StateVector initial_state();

/// Hamiltonian of two noninteracting spins in a constant z field,
/// diag(+1, 0, 0, -1) in units where the level spacing is 1. Eigenvalues
/// +1 and -1 are simple; 0 is doubly degenerate on span{|ud>, |du>}.
Observable hamiltonian();

/// z spin of the first particle, diag(+1, +1, -1, -1).
Observable sigma_1z();

/// Total spin squared. Eigenvalues 2 (triplet) and 0 (singlet).
Observable s_squared();

/// cos(theta/2)|ud> + e^{i phi} sin(theta/2)|du>.
StateVector theta_phi_state(SphereCoordinates coords);

/// Inverse of theta_phi_state modulo global phase. The |uu> and |dd>
/// amplitudes must have magnitude below 1e-6 (SubspaceError otherwise).
/// The phase convention makes the |ud> amplitude real and nonnegative.
SphereCoordinates bloch_coordinates(const StateVector& state);

/// <psi|A|psi>. Throws HermiticityError if the imaginary part exceeds 1e-9.
double expectation(const StateVector& state, const Observable& obs);

/// <A^2> - <A>^2, clamped to 0 when a rounding residual puts it within
/// 1e-12 below zero.
double variance(const StateVector& state, const Observable& obs);

/// Max absolute entry of AB - BA.
double commutator_norm(const Observable& a, const Observable& b);

}  // namespace spinreduce
