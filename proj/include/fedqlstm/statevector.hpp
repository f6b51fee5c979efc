#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"

namespace fedqlstm {

using Complex = std::complex<double>;

// Dense statevector simulation of small registers. Qubit 0 is the least
// significant bit of the basis-state index throughout.

inline constexpr int kMinQubits = 1;
inline constexpr int kMaxQubits = 12;

enum class GateKind { RY, RZ, RotXYZ, CNOT };

struct GateOp {
    GateKind kind = GateKind::RY;
    int target = 0;
    int control = -1;                // CNOT only
    std::array<double, 3> angles{};  // RY/RZ use [0]; RotXYZ uses (alpha, beta, gamma)

    static GateOp ry(int target, double theta) { return {GateKind::RY, target, -1, {theta, 0.0, 0.0}}; }
    static GateOp rz(int target, double theta) { return {GateKind::RZ, target, -1, {theta, 0.0, 0.0}}; }
    static GateOp rot(int target, double alpha, double beta, double gamma) {
        return {GateKind::RotXYZ, target, -1, {alpha, beta, gamma}};
    }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, {}}; }
};

struct StateVector {
    int num_qubits = 0;
    std::vector<Complex> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }

    void reset_zero() {
        std::fill(amplitudes.begin(), amplitudes.end(), Complex(0.0, 0.0));
        amplitudes[0] = Complex(1.0, 0.0);
    }
};

inline StateVector zero_state(int num_qubits) {
    if (num_qubits < kMinQubits || num_qubits > kMaxQubits)
        throw ConfigError("zero_state: num_qubits must be in [1, 12], got " + std::to_string(num_qubits));
    StateVector state;
    state.num_qubits = num_qubits;
    state.amplitudes.assign(std::size_t{1} << num_qubits, Complex(0.0, 0.0));
    state.amplitudes[0] = Complex(1.0, 0.0);
    return state;
}

// 2x2 matrix of a single-qubit gate, row-major. RotXYZ(alpha, beta, gamma) is
// the product RZ(gamma) * RY(beta) * RZ(alpha).
inline std::array<Complex, 4> single_qubit_matrix(const GateOp& gate) {
    switch (gate.kind) {
        case GateKind::RY: {
            const double c = std::cos(gate.angles[0] * 0.5);
            const double s = std::sin(gate.angles[0] * 0.5);
            return {Complex(c, 0.0), Complex(-s, 0.0), Complex(s, 0.0), Complex(c, 0.0)};
        }
        case GateKind::RZ: {
            const Complex e(std::cos(gate.angles[0] * 0.5), -std::sin(gate.angles[0] * 0.5));
            return {e, Complex(0.0, 0.0), Complex(0.0, 0.0), std::conj(e)};
        }
        case GateKind::RotXYZ: {
            const double cb = std::cos(gate.angles[1] * 0.5);
            const double sb = std::sin(gate.angles[1] * 0.5);
            const double plus = (gate.angles[2] + gate.angles[0]) * 0.5;
            const double minus = (gate.angles[2] - gate.angles[0]) * 0.5;
            return {Complex(std::cos(plus), -std::sin(plus)) * cb,
                    Complex(-std::cos(minus), std::sin(minus)) * sb,
                    Complex(std::cos(minus), std::sin(minus)) * sb,
                    Complex(std::cos(plus), std::sin(plus)) * cb};
        }
        case GateKind::CNOT:
            break;
    }
    throw ShapeError("single_qubit_matrix: CNOT has no 2x2 form");
}

inline void apply_gate_inplace(StateVector& state, const GateOp& gate) {
    const std::size_t dim = state.dim();
    if (gate.target < 0 || gate.target >= state.num_qubits)
        throw ShapeError("apply_gate: target qubit " + std::to_string(gate.target) + " out of range");

    if (gate.kind == GateKind::CNOT) {
        if (gate.control < 0 || gate.control >= state.num_qubits)
            throw ShapeError("apply_gate: control qubit " + std::to_string(gate.control) + " out of range");
        if (gate.control == gate.target)
            throw ShapeError("apply_gate: CNOT control equals target");
        const std::size_t cbit = std::size_t{1} << gate.control;
        const std::size_t tbit = std::size_t{1} << gate.target;
        for (std::size_t i = 0; i < dim; ++i) {
            if ((i & cbit) != 0 && (i & tbit) == 0)
                std::swap(state.amplitudes[i], state.amplitudes[i | tbit]);
        }
        return;
    }

    const std::array<Complex, 4> u = single_qubit_matrix(gate);
    const std::size_t bit = std::size_t{1} << gate.target;
    for (std::size_t base = 0; base < dim; base += bit << 1) {
        for (std::size_t i = base; i < base + bit; ++i) {
            const Complex a0 = state.amplitudes[i];
            const Complex a1 = state.amplitudes[i | bit];
            state.amplitudes[i] = u[0] * a0 + u[1] * a1;
            state.amplitudes[i | bit] = u[2] * a0 + u[3] * a1;
        }
    }
}

inline StateVector apply_gate(StateVector state, const GateOp& gate) {
    apply_gate_inplace(state, gate);
    return state;
}

inline double expect_z(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.num_qubits)
        throw ShapeError("expect_z: qubit " + std::to_string(qubit) + " out of range");
    const std::size_t bit = std::size_t{1} << qubit;
    double acc = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amplitudes[i]);
        acc += (i & bit) ? -p : p;
    }
    return acc;
}

inline double norm_sq(const StateVector& state) {
    double acc = 0.0;
    for (const Complex& a : state.amplitudes) acc += std::norm(a);
    return acc;
}

}  // namespace fedqlstm
