#include "spinreduce/qstate.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spinreduce {

namespace {

constexpr double kInputNormTol = 1e-6;
constexpr double kHermitianTol = 1e-12;
constexpr double kImagTol = 1e-9;
constexpr double kSubspaceTol = 1e-6;
constexpr double kPoleTol = 1e-9;

}  // namespace

StateVector::StateVector(const Eigen::Vector4cd& amplitudes) : amps_(amplitudes) {
    const double n = amps_.norm();
    if (!(n > 0.0)) {
        throw NormError("state amplitudes are all zero");
    }
    amps_ /= n;
}

Observable::Observable(const Eigen::Matrix4cd& matrix) : m_(matrix) {
    const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol) {
        throw HermiticityError("matrix deviates from Hermitian by " + std::to_string(dev));
    }
}

StateVector make_state(const std::array<Complex, 4>& amplitudes) {
    Eigen::Vector4cd a;
    a << amplitudes[0], amplitudes[1], amplitudes[2], amplitudes[3];
    const double n = a.norm();
    if (std::abs(n - 1.0) > kInputNormTol) {
        throw NormError("input norm " + std::to_string(n) + " is not within 1e-6 of 1");
    }
    return StateVector(a);
}

StateVector make_state(Complex a_uu, Complex a_ud, Complex a_du, Complex a_dd) {
    return make_state(std::array<Complex, 4>{a_uu, a_ud, a_du, a_dd});
}

StateVector initial_state() {
    return make_state(0.5, 0.5, -0.5, 0.5);
}

Observable hamiltonian() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 1.0;
    m(3, 3) = -1.0;
    return Observable(m);
}

Observable sigma_1z() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    m(2, 2) = -1.0;
    m(3, 3) = -1.0;
    return Observable(m);
}

Observable s_squared() {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = 2.0;
    m(1, 1) = 1.0;
    m(2, 2) = 1.0;
    m(3, 3) = 2.0;
    m(1, 2) = 1.0;
    m(2, 1) = 1.0;
    return Observable(m);
}

StateVector theta_phi_state(SphereCoordinates coords) {
    Eigen::Vector4cd a = Eigen::Vector4cd::Zero();
    a(1) = std::cos(0.5 * coords.theta);
    a(2) = std::polar(std::sin(0.5 * coords.theta), coords.phi);
    return StateVector(a);
}

SphereCoordinates bloch_coordinates(const StateVector& state) {
    const Eigen::Vector4cd& a = state.amplitudes();
    if (std::abs(a(0)) >= kSubspaceTol || std::abs(a(3)) >= kSubspaceTol) {
        throw SubspaceError("state has weight outside the zero-energy subspace");
    }
    const Complex up_down = a(1);
    const Complex down_up = a(2);
    const double theta = 2.0 * std::atan2(std::abs(down_up), std::abs(up_down));

    double phi = 0.0;
    if (theta >= kPoleTol && std::numbers::pi - theta >= kPoleTol) {
        // Global phase fixed by rotating the |ud> amplitude onto the
        // positive real axis; what remains on |du> is e^{i phi}.
        phi = std::arg(down_up * std::conj(up_down));
        if (phi < 0.0) {
            phi += 2.0 * std::numbers::pi;
        }
        if (phi >= 2.0 * std::numbers::pi) {
            phi = 0.0;
        }
    }
    return {theta, phi};
}

double expectation(const StateVector& state, const Observable& obs) {
    const Complex value = state.amplitudes().dot(obs.matrix() * state.amplitudes());
    if (std::abs(value.imag()) > kImagTol) {
        throw HermiticityError("expectation has imaginary part " + std::to_string(value.imag()));
    }
    return value.real();
}

double variance(const StateVector& state, const Observable& obs) {
    const Eigen::Vector4cd w = obs.matrix() * state.amplitudes();
    const Complex mean = state.amplitudes().dot(w);
    if (std::abs(mean.imag()) > kImagTol) {
        throw HermiticityError("expectation has imaginary part " + std::to_string(mean.imag()));
    }
    double v = w.squaredNorm() - mean.real() * mean.real();
    if (v < 0.0 && v >= -kHermitianTol) {
        v = 0.0;
    }
    return v;
}

double commutator_norm(const Observable& a, const Observable& b) {
    return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace spinreduce
