#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/rng.hpp"
#include "fedqlstm/statevector.hpp"

namespace fedqlstm {

// Variational quantum circuit: per-qubit RY/RZ angle encoding of the input,
// then num_layers repetitions of a nearest-neighbor CNOT block followed by a
// general rotation RotXYZ on every qubit, read out as Pauli-Z expectations.
// Gradients for both trainable angles and inputs use the two-term
// parameter-shift rule, which is exact for this gate set.

// Entangler topology. The closed ring (control i -> target (i+1) mod n,
// including the wraparound) is the default; the open chain drops the
// wraparound CNOT.
enum class Entangler { Ring, Chain };

struct VqcConfig {
    int num_qubits = 4;
    int num_layers = 2;
    int input_dim = 4;
    int output_dim = 4;
    Entangler entangler = Entangler::Ring;

    void validate() const {
        if (num_qubits < kMinQubits || num_qubits > kMaxQubits)
            throw ConfigError("VqcConfig: num_qubits must be in [1, 12]");
        if (num_layers < 1) throw ConfigError("VqcConfig: num_layers must be >= 1");
        if (input_dim < 0 || input_dim > num_qubits)
            throw ConfigError("VqcConfig: input_dim must be in [0, num_qubits]");
        if (output_dim < 1 || output_dim > num_qubits)
            throw ConfigError("VqcConfig: output_dim must be in [1, num_qubits]");
    }

    int angle_count() const { return num_layers * num_qubits * 3; }
};

// Small-angle initialization keeps early circuits near the identity.
inline constexpr double kVqcInitRange = std::numbers::pi / 50.0;

struct VqcParams {
    // [layer][qubit][channel], row-major; channel order (alpha, beta, gamma).
    std::vector<double> angles;

    static VqcParams zeros(const VqcConfig& config) {
        VqcParams p;
        p.angles.assign(static_cast<std::size_t>(config.angle_count()), 0.0);
        return p;
    }

    static VqcParams random_init(const VqcConfig& config, Rng& rng, double range = kVqcInitRange) {
        VqcParams p = zeros(config);
        for (double& a : p.angles) a = rng.uniform(-range, range);
        return p;
    }

    static std::size_t index(const VqcConfig& config, int layer, int qubit, int channel) {
        return static_cast<std::size_t>((layer * config.num_qubits + qubit) * 3 + channel);
    }

    void check_shape(const VqcConfig& config) const {
        if (angles.size() != static_cast<std::size_t>(config.angle_count()))
            throw ShapeError("VqcParams: expected " + std::to_string(config.angle_count()) +
                             " angles, got " + std::to_string(angles.size()));
        for (double a : angles)
            if (!std::isfinite(a)) throw NumericError("VqcParams: non-finite angle");
    }
};

// Encoding gates: RY(arctan(x_i)) then RZ(arctan(x_i^2)) on qubit i. Qubits at
// or beyond input_dim carry no input and receive no encoding gates.
inline std::vector<GateOp> encode(std::span<const double> x, const VqcConfig& config) {
    if (x.size() != static_cast<std::size_t>(config.input_dim))
        throw ShapeError("encode: expected " + std::to_string(config.input_dim) +
                         " inputs, got " + std::to_string(x.size()));
    std::vector<GateOp> gates;
    gates.reserve(x.size() * 2);
    for (int i = 0; i < config.input_dim; ++i) {
        gates.push_back(GateOp::ry(i, std::atan(x[static_cast<std::size_t>(i)])));
        gates.push_back(GateOp::rz(i, std::atan(x[static_cast<std::size_t>(i)] *
                                                x[static_cast<std::size_t>(i)])));
    }
    return gates;
}

namespace detail {

// Gate program for one (x, params) pair. Angle slots are addressable so the
// shift-rule evaluations can nudge a single angle in place.
struct VqcProgram {
    VqcConfig config;
    std::vector<GateOp> gates;

    int entangler_size() const {
        if (config.num_qubits < 2) return 0;
        return config.entangler == Entangler::Ring ? config.num_qubits : config.num_qubits - 1;
    }

    std::size_t encode_gate(int qubit, int channel) const {  // channel 0 = RY, 1 = RZ
        return static_cast<std::size_t>(2 * qubit + channel);
    }

    std::size_t rotation_gate(int layer, int qubit) const {
        const int block = entangler_size() + config.num_qubits;
        return static_cast<std::size_t>(2 * config.input_dim + layer * block + entangler_size() +
                                        qubit);
    }
};

inline VqcProgram build_program(std::span<const double> x, const VqcParams& params,
                                const VqcConfig& config) {
    VqcProgram prog;
    prog.config = config;
    prog.gates = encode(x, config);
    const int cnots = prog.entangler_size();
    for (int layer = 0; layer < config.num_layers; ++layer) {
        for (int q = 0; q < cnots; ++q)
            prog.gates.push_back(GateOp::cnot(q, (q + 1) % config.num_qubits));
        for (int q = 0; q < config.num_qubits; ++q) {
            const std::size_t base = VqcParams::index(config, layer, q, 0);
            prog.gates.push_back(GateOp::rot(q, params.angles[base], params.angles[base + 1],
                                             params.angles[base + 2]));
        }
    }
    return prog;
}

inline void run_program(const VqcProgram& prog, StateVector& scratch, std::span<double> out) {
    scratch.reset_zero();
    for (const GateOp& g : prog.gates) apply_gate_inplace(scratch, g);
    for (int k = 0; k < prog.config.output_dim; ++k)
        out[static_cast<std::size_t>(k)] = expect_z(scratch, k);
}

inline bool all_zero(std::span<const double> v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

// d<Z_k>/d(angle slot) for all k, via the shift rule, contracted with
// `upstream`. The slot is restored afterwards.
inline double shift_rule(VqcProgram& prog, StateVector& scratch, double& slot,
                         std::span<const double> upstream, std::span<double> plus,
                         std::span<double> minus) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    const double orig = slot;
    slot = orig + half_pi;
    run_program(prog, scratch, plus);
    slot = orig - half_pi;
    run_program(prog, scratch, minus);
    slot = orig;
    double acc = 0.0;
    for (int k = 0; k < prog.config.output_dim; ++k)
        acc += upstream[static_cast<std::size_t>(k)] *
               (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]) * 0.5;
    return acc;
}

}  // namespace detail

inline std::vector<double> vqc_forward(std::span<const double> x, const VqcParams& params,
                                       const VqcConfig& config) {
    config.validate();
    params.check_shape(config);
    detail::VqcProgram prog = detail::build_program(x, params, config);
    StateVector scratch = zero_state(config.num_qubits);
    std::vector<double> out(static_cast<std::size_t>(config.output_dim));
    detail::run_program(prog, scratch, out);
    return out;
}

// Accumulates d(upstream . vqc_forward)/d(params) into *param_grad (when
// non-null) and d/d(x) into input_grad (when non-empty). Shared program and
// scratch state make this the cheap path for backpropagation through time.
inline void vqc_backward_accumulate(std::span<const double> x, const VqcParams& params,
                                    const VqcConfig& config, std::span<const double> upstream,
                                    VqcParams* param_grad, std::span<double> input_grad) {
    config.validate();
    params.check_shape(config);
    if (upstream.size() != static_cast<std::size_t>(config.output_dim))
        throw ShapeError("vqc_backward: upstream size mismatch");
    if (param_grad != nullptr && param_grad->angles.size() != params.angles.size())
        throw ShapeError("vqc_backward: param_grad shape mismatch");
    if (!input_grad.empty() && input_grad.size() != static_cast<std::size_t>(config.input_dim))
        throw ShapeError("vqc_backward: input_grad size mismatch");
    if (detail::all_zero(upstream)) return;

    detail::VqcProgram prog = detail::build_program(x, params, config);
    StateVector scratch = zero_state(config.num_qubits);
    std::vector<double> plus(static_cast<std::size_t>(config.output_dim));
    std::vector<double> minus(static_cast<std::size_t>(config.output_dim));

    if (param_grad != nullptr)
        for (int layer = 0; layer < config.num_layers; ++layer)
            for (int q = 0; q < config.num_qubits; ++q) {
                GateOp& gate = prog.gates[prog.rotation_gate(layer, q)];
                for (int c = 0; c < 3; ++c)
                    param_grad->angles[VqcParams::index(config, layer, q, c)] +=
                        detail::shift_rule(prog, scratch, gate.angles[static_cast<std::size_t>(c)],
                                           upstream, plus, minus);
            }

    if (input_grad.empty()) return;
    for (int i = 0; i < config.input_dim; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        // Chain rule through the encoding maps arctan(x) and arctan(x^2).
        const double d_ry = 1.0 / (1.0 + xi * xi);
        const double d_rz = 2.0 * xi / (1.0 + xi * xi * xi * xi);
        double acc = 0.0;
        acc += d_ry * detail::shift_rule(prog, scratch, prog.gates[prog.encode_gate(i, 0)].angles[0],
                                         upstream, plus, minus);
        if (d_rz != 0.0)
            acc += d_rz * detail::shift_rule(prog, scratch, prog.gates[prog.encode_gate(i, 1)].angles[0],
                                             upstream, plus, minus);
        input_grad[static_cast<std::size_t>(i)] += acc;
    }
}

inline VqcParams vqc_param_grad(std::span<const double> x, const VqcParams& params,
                                const VqcConfig& config, std::span<const double> upstream) {
    VqcParams grad = VqcParams::zeros(config);
    vqc_backward_accumulate(x, params, config, upstream, &grad, {});
    return grad;
}

inline std::vector<double> vqc_input_grad(std::span<const double> x, const VqcParams& params,
                                          const VqcConfig& config,
                                          std::span<const double> upstream) {
    std::vector<double> grad(static_cast<std::size_t>(config.input_dim), 0.0);
    vqc_backward_accumulate(x, params, config, upstream, nullptr, grad);
    return grad;
}

}  // namespace fedqlstm
