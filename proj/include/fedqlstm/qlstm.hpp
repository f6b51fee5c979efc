#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/params.hpp"
#include "fedqlstm/rng.hpp"
#include "fedqlstm/vqc.hpp"

namespace fedqlstm {

// Recurrent cell built from six variational quantum circuits. At each step the
// concatenation v_t = [x_t, h_{t-1}] fills the register exactly; circuits 1-4
// produce the forget/input/candidate/output gates, circuit 5 produces the next
// hidden state, and circuit 6 feeds a trainable affine readout. Training is
// backpropagation through time with every circuit Jacobian evaluated by the
// parameter-shift rule.

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct QlstmDims {
    int input_dim = 1;
    int hidden_dim = 3;
    int num_qubits = 4;  // also the cell dimension
    int num_layers = 2;

    void validate() const {
        if (input_dim < 1) throw ConfigError("QlstmDims: input_dim must be >= 1");
        if (hidden_dim < 1) throw ConfigError("QlstmDims: hidden_dim must be >= 1");
        if (input_dim + hidden_dim != num_qubits)
            throw ConfigError("QlstmDims: input_dim + hidden_dim must equal num_qubits");
        VqcConfig{num_qubits, num_layers, num_qubits, num_qubits}.validate();
    }
};

struct CellState {
    std::vector<double> h;  // [hidden_dim], entries in [-1, 1]
    std::vector<double> c;  // [num_qubits]

    static CellState zero(const QlstmDims& dims) {
        return {std::vector<double>(static_cast<std::size_t>(dims.hidden_dim), 0.0),
                std::vector<double>(static_cast<std::size_t>(dims.num_qubits), 0.0)};
    }
};

inline constexpr int kNumVqcBlocks = 6;

struct QlstmModel {
    QlstmDims dims;
    std::array<VqcParams, kNumVqcBlocks> vqc;  // forget, input, candidate, output, hidden, readout
    std::vector<double> out_weight;            // [num_qubits]
    double out_bias = 0.0;

    VqcConfig vqc_config() const {
        return {dims.num_qubits, dims.num_layers, dims.num_qubits, dims.num_qubits};
    }

    static QlstmModel zeros(const QlstmDims& dims) {
        dims.validate();
        QlstmModel m;
        m.dims = dims;
        const VqcConfig config = m.vqc_config();
        for (auto& block : m.vqc) block = VqcParams::zeros(config);
        m.out_weight.assign(static_cast<std::size_t>(dims.num_qubits), 0.0);
        return m;
    }

    static QlstmModel init(const QlstmDims& dims, Rng& rng) {
        QlstmModel m = zeros(dims);
        const VqcConfig config = m.vqc_config();
        for (auto& block : m.vqc) block = VqcParams::random_init(config, rng);
        for (double& w : m.out_weight) w = rng.uniform(-0.5, 0.5);
        m.out_bias = rng.uniform(-0.5, 0.5);
        return m;
    }

    std::size_t param_count() const {
        return static_cast<std::size_t>(kNumVqcBlocks * vqc_config().angle_count() +
                                        dims.num_qubits + 1);
    }

    ParamLayout param_layout() const {
        const std::size_t block = static_cast<std::size_t>(vqc_config().angle_count());
        ParamLayout layout;
        for (int b = 0; b < kNumVqcBlocks; ++b)
            layout.tensors.emplace_back("vqc" + std::to_string(b + 1), block);
        layout.tensors.emplace_back("out_weight", static_cast<std::size_t>(dims.num_qubits));
        layout.tensors.emplace_back("out_bias", 1);
        return layout;
    }

    std::vector<double> flat_params() const {
        std::vector<double> flat;
        flat.reserve(param_count());
        for (const auto& block : vqc)
            flat.insert(flat.end(), block.angles.begin(), block.angles.end());
        flat.insert(flat.end(), out_weight.begin(), out_weight.end());
        flat.push_back(out_bias);
        return flat;
    }

    void set_flat_params(std::span<const double> flat) {
        if (flat.size() != param_count())
            throw ShapeError("QlstmModel: expected " + std::to_string(param_count()) +
                             " parameters, got " + std::to_string(flat.size()));
        std::size_t at = 0;
        for (auto& block : vqc)
            for (double& a : block.angles) a = flat[at++];
        for (double& w : out_weight) w = flat[at++];
        out_bias = flat[at];
    }

    double predict(std::span<const double> seq) const;
    struct LossGrad {
        double loss = 0.0;
        double prediction = 0.0;
        std::vector<double> grad;  // flat, same layout as flat_params()
    };
    LossGrad loss_and_grad(std::span<const double> seq, double target) const;
};

// c_t = i_t o C~_t + f_t o c_{t-1}
inline std::vector<double> cell_update(std::span<const double> gate_i, std::span<const double> cand,
                                       std::span<const double> gate_f,
                                       std::span<const double> c_prev) {
    std::vector<double> c(gate_i.size());
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = gate_i[k] * cand[k] + gate_f[k] * c_prev[k];
    return c;
}

namespace detail {

struct QlstmStepTrace {
    std::vector<double> v;                // [Q] concat(x_t, h_prev)
    std::vector<double> f, i, g, o;       // [Q] post-activation gates
    std::vector<double> c, tanh_c, u;     // [Q]
    std::vector<double> h;                // [hidden_dim]
    std::vector<double> readout;          // [Q] circuit-6 output, when y was computed
    double y = 0.0;
    bool has_y = false;
};

inline void qlstm_step_trace(const QlstmModel& model, std::span<const double> x_t,
                             const CellState& prev, bool want_y, QlstmStepTrace& trace) {
    const QlstmDims& dims = model.dims;
    if (x_t.size() != static_cast<std::size_t>(dims.input_dim))
        throw ShapeError("qlstm_step: input size mismatch");
    if (prev.h.size() != static_cast<std::size_t>(dims.hidden_dim) ||
        prev.c.size() != static_cast<std::size_t>(dims.num_qubits))
        throw ShapeError("qlstm_step: state size mismatch");
    const VqcConfig config = model.vqc_config();
    const std::size_t q = static_cast<std::size_t>(dims.num_qubits);

    trace.v.assign(x_t.begin(), x_t.end());
    trace.v.insert(trace.v.end(), prev.h.begin(), prev.h.end());

    trace.f = vqc_forward(trace.v, model.vqc[0], config);
    trace.i = vqc_forward(trace.v, model.vqc[1], config);
    trace.g = vqc_forward(trace.v, model.vqc[2], config);
    trace.o = vqc_forward(trace.v, model.vqc[3], config);
    for (std::size_t k = 0; k < q; ++k) {
        trace.f[k] = sigmoid(trace.f[k]);
        trace.i[k] = sigmoid(trace.i[k]);
        trace.g[k] = std::tanh(trace.g[k]);
        trace.o[k] = sigmoid(trace.o[k]);
    }

    trace.c = cell_update(trace.i, trace.g, trace.f, prev.c);
    trace.tanh_c.resize(q);
    trace.u.resize(q);
    for (std::size_t k = 0; k < q; ++k) {
        trace.tanh_c[k] = std::tanh(trace.c[k]);
        trace.u[k] = trace.o[k] * trace.tanh_c[k];
        if (!std::isfinite(trace.c[k])) throw NumericError("qlstm_step: non-finite cell state");
    }

    const auto hidden_out = vqc_forward(trace.u, model.vqc[4], config);
    trace.h.assign(hidden_out.begin(), hidden_out.begin() + dims.hidden_dim);

    trace.has_y = want_y;
    if (want_y) {
        trace.readout = vqc_forward(trace.u, model.vqc[5], config);
        double y = model.out_bias;
        for (std::size_t k = 0; k < q; ++k) y += model.out_weight[k] * trace.readout[k];
        if (!std::isfinite(y)) throw NumericError("qlstm_step: non-finite output");
        trace.y = y;
    }
}

}  // namespace detail

inline std::pair<CellState, double> qlstm_step(std::span<const double> x_t, const CellState& state,
                                               const QlstmModel& model) {
    detail::QlstmStepTrace trace;
    detail::qlstm_step_trace(model, x_t, state, /*want_y=*/true, trace);
    return {CellState{trace.h, trace.c}, trace.y};
}

// Runs the cell over a row-major [T][input_dim] sequence from the zero state
// and returns the final prediction y_T.
inline double forward_sequence(const QlstmModel& model, std::span<const double> seq) {
    model.dims.validate();
    const std::size_t d = static_cast<std::size_t>(model.dims.input_dim);
    if (seq.empty() || seq.size() % d != 0)
        throw ShapeError("forward_sequence: sequence length must be a positive multiple of input_dim");
    const std::size_t steps = seq.size() / d;

    CellState state = CellState::zero(model.dims);
    detail::QlstmStepTrace trace;
    for (std::size_t t = 0; t < steps; ++t) {
        detail::qlstm_step_trace(model, seq.subspan(t * d, d), state, t + 1 == steps, trace);
        state.h = trace.h;
        state.c = trace.c;
    }
    return trace.y;
}

struct QlstmGradients {
    std::array<VqcParams, kNumVqcBlocks> vqc;
    std::vector<double> out_weight;
    double out_bias = 0.0;
    double loss = 0.0;
    double prediction = 0.0;

    static QlstmGradients zeros(const QlstmModel& model) {
        QlstmGradients g;
        const VqcConfig config = model.vqc_config();
        for (auto& block : g.vqc) block = VqcParams::zeros(config);
        g.out_weight.assign(static_cast<std::size_t>(model.dims.num_qubits), 0.0);
        return g;
    }

    std::vector<double> flatten() const {
        std::vector<double> flat;
        for (const auto& block : vqc)
            flat.insert(flat.end(), block.angles.begin(), block.angles.end());
        flat.insert(flat.end(), out_weight.begin(), out_weight.end());
        flat.push_back(out_bias);
        return flat;
    }
};

// Gradient of L = (y_T - target)^2 with respect to every trainable tensor,
// by backpropagation through time. Circuit parameter and input Jacobians come
// from the parameter-shift rule; the hidden-state path chains through the
// arctan encoding of v_{t+1}.
inline QlstmGradients backward_sequence(const QlstmModel& model, std::span<const double> seq,
                                        double target) {
    model.dims.validate();
    const QlstmDims& dims = model.dims;
    const std::size_t d = static_cast<std::size_t>(dims.input_dim);
    const std::size_t q = static_cast<std::size_t>(dims.num_qubits);
    if (seq.empty() || seq.size() % d != 0)
        throw ShapeError("backward_sequence: sequence length must be a positive multiple of input_dim");
    const std::size_t steps = seq.size() / d;
    const VqcConfig config = model.vqc_config();

    // Forward pass, keeping one trace per step.
    std::vector<detail::QlstmStepTrace> traces(steps);
    CellState state = CellState::zero(dims);
    for (std::size_t t = 0; t < steps; ++t) {
        detail::qlstm_step_trace(model, seq.subspan(t * d, d), state, t + 1 == steps, traces[t]);
        state.h = traces[t].h;
        state.c = traces[t].c;
    }

    QlstmGradients grad = QlstmGradients::zeros(model);
    grad.prediction = traces[steps - 1].y;
    const double residual = grad.prediction - target;
    grad.loss = residual * residual;
    if (!std::isfinite(grad.loss)) throw NumericError("backward_sequence: non-finite loss");
    const double dy = 2.0 * residual;

    std::vector<double> dh(static_cast<std::size_t>(dims.hidden_dim), 0.0);
    std::vector<double> dc(q, 0.0);
    std::vector<double> du(q), dv(q), upstream(q), dz(q);
    const std::vector<double> zero_cell(q, 0.0);

    for (std::size_t t = steps; t-- > 0;) {
        const detail::QlstmStepTrace& trace = traces[t];
        const std::vector<double>& c_prev = t > 0 ? traces[t - 1].c : zero_cell;

        std::fill(du.begin(), du.end(), 0.0);

        if (t + 1 == steps && dy != 0.0) {
            grad.out_bias += dy;
            for (std::size_t k = 0; k < q; ++k) {
                grad.out_weight[k] += dy * trace.readout[k];
                upstream[k] = dy * model.out_weight[k];
            }
            vqc_backward_accumulate(trace.u, model.vqc[5], config, upstream, &grad.vqc[5], du);
        }

        // Hidden-state path: circuit 5 sees upstream only on its first
        // hidden_dim outputs (and none at the final step).
        bool dh_nonzero = false;
        for (double x : dh) dh_nonzero |= (x != 0.0);
        if (dh_nonzero) {
            std::fill(upstream.begin(), upstream.end(), 0.0);
            std::copy(dh.begin(), dh.end(), upstream.begin());
            vqc_backward_accumulate(trace.u, model.vqc[4], config, upstream, &grad.vqc[4], du);
        }

        // u = o o tanh(c)
        for (std::size_t k = 0; k < q; ++k) {
            dc[k] += du[k] * trace.o[k] * (1.0 - trace.tanh_c[k] * trace.tanh_c[k]);
        }

        std::fill(dv.begin(), dv.end(), 0.0);

        // Output gate: do = du o tanh_c, through the sigmoid.
        for (std::size_t k = 0; k < q; ++k)
            dz[k] = du[k] * trace.tanh_c[k] * trace.o[k] * (1.0 - trace.o[k]);
        vqc_backward_accumulate(trace.v, model.vqc[3], config, dz, &grad.vqc[3], dv);

        // Forget gate: df = dc o c_prev.
        for (std::size_t k = 0; k < q; ++k)
            dz[k] = dc[k] * c_prev[k] * trace.f[k] * (1.0 - trace.f[k]);
        vqc_backward_accumulate(trace.v, model.vqc[0], config, dz, &grad.vqc[0], dv);

        // Input gate: di = dc o g.
        for (std::size_t k = 0; k < q; ++k)
            dz[k] = dc[k] * trace.g[k] * trace.i[k] * (1.0 - trace.i[k]);
        vqc_backward_accumulate(trace.v, model.vqc[1], config, dz, &grad.vqc[1], dv);

        // Candidate: dg = dc o i, through the tanh.
        for (std::size_t k = 0; k < q; ++k)
            dz[k] = dc[k] * trace.i[k] * (1.0 - trace.g[k] * trace.g[k]);
        vqc_backward_accumulate(trace.v, model.vqc[2], config, dz, &grad.vqc[2], dv);

        // Split dv into (discarded) input part and the hidden carry; carry the
        // cell path through the forget gate.
        for (std::size_t k = 0; k < static_cast<std::size_t>(dims.hidden_dim); ++k)
            dh[k] = dv[d + k];
        for (std::size_t k = 0; k < q; ++k) dc[k] *= trace.f[k];
    }

    return grad;
}

inline double QlstmModel::predict(std::span<const double> seq) const {
    return forward_sequence(*this, seq);
}

inline QlstmModel::LossGrad QlstmModel::loss_and_grad(std::span<const double> seq,
                                                      double target) const {
    const QlstmGradients g = backward_sequence(*this, seq, target);
    return {g.loss, g.prediction, g.flatten()};
}

}  // namespace fedqlstm
