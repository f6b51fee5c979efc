#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/params.hpp"
#include "fedqlstm/qlstm.hpp"  // sigmoid, cell_update
#include "fedqlstm/rng.hpp"

namespace fedqlstm {

// Textbook LSTM baseline with an affine readout from the final hidden state.
// Interface mirrors QlstmModel so the federated layer can train either.

struct LstmDims {
    int input_dim = 1;
    int hidden_dim = 4;

    void validate() const {
        if (input_dim < 1) throw ConfigError("LstmDims: input_dim must be >= 1");
        if (hidden_dim < 1) throw ConfigError("LstmDims: hidden_dim must be >= 1");
    }
};

namespace detail {
inline constexpr std::array<const char*, 4> kLstmGateNames{"f", "i", "g", "o"};
}

struct ClassicalLstmModel {
    LstmDims dims;
    // Gate order: forget, input, candidate, output. Row-major [hidden][input]
    // and [hidden][hidden].
    std::array<std::vector<double>, 4> w_in;
    std::array<std::vector<double>, 4> w_rec;
    std::array<std::vector<double>, 4> bias;
    std::vector<double> out_weight;  // [hidden]
    double out_bias = 0.0;

    static ClassicalLstmModel zeros(const LstmDims& dims) {
        dims.validate();
        ClassicalLstmModel m;
        m.dims = dims;
        const std::size_t h = static_cast<std::size_t>(dims.hidden_dim);
        const std::size_t d = static_cast<std::size_t>(dims.input_dim);
        for (int gate = 0; gate < 4; ++gate) {
            m.w_in[static_cast<std::size_t>(gate)].assign(h * d, 0.0);
            m.w_rec[static_cast<std::size_t>(gate)].assign(h * h, 0.0);
            m.bias[static_cast<std::size_t>(gate)].assign(h, 0.0);
        }
        m.out_weight.assign(h, 0.0);
        return m;
    }

    static ClassicalLstmModel init(const LstmDims& dims, Rng& rng) {
        ClassicalLstmModel m = zeros(dims);
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims.hidden_dim));
        for (int gate = 0; gate < 4; ++gate) {
            for (double& w : m.w_in[static_cast<std::size_t>(gate)]) w = rng.uniform(-bound, bound);
            for (double& w : m.w_rec[static_cast<std::size_t>(gate)]) w = rng.uniform(-bound, bound);
            for (double& w : m.bias[static_cast<std::size_t>(gate)]) w = rng.uniform(-bound, bound);
        }
        for (double& w : m.out_weight) w = rng.uniform(-bound, bound);
        m.out_bias = rng.uniform(-bound, bound);
        return m;
    }

    std::size_t param_count() const {
        const std::size_t h = static_cast<std::size_t>(dims.hidden_dim);
        const std::size_t d = static_cast<std::size_t>(dims.input_dim);
        return 4 * (h * d + h * h + h) + h + 1;
    }

    ParamLayout param_layout() const {
        const std::size_t h = static_cast<std::size_t>(dims.hidden_dim);
        const std::size_t d = static_cast<std::size_t>(dims.input_dim);
        ParamLayout layout;
        for (int gate = 0; gate < 4; ++gate) {
            const std::string suffix = detail::kLstmGateNames[static_cast<std::size_t>(gate)];
            layout.tensors.emplace_back("w_in_" + suffix, h * d);
            layout.tensors.emplace_back("w_rec_" + suffix, h * h);
            layout.tensors.emplace_back("bias_" + suffix, h);
        }
        layout.tensors.emplace_back("out_weight", h);
        layout.tensors.emplace_back("out_bias", 1);
        return layout;
    }

    std::vector<double> flat_params() const {
        std::vector<double> flat;
        flat.reserve(param_count());
        for (int gate = 0; gate < 4; ++gate) {
            const auto g = static_cast<std::size_t>(gate);
            flat.insert(flat.end(), w_in[g].begin(), w_in[g].end());
            flat.insert(flat.end(), w_rec[g].begin(), w_rec[g].end());
            flat.insert(flat.end(), bias[g].begin(), bias[g].end());
        }
        flat.insert(flat.end(), out_weight.begin(), out_weight.end());
        flat.push_back(out_bias);
        return flat;
    }

    void set_flat_params(std::span<const double> flat) {
        if (flat.size() != param_count())
            throw ShapeError("ClassicalLstmModel: expected " + std::to_string(param_count()) +
                             " parameters, got " + std::to_string(flat.size()));
        std::size_t at = 0;
        for (int gate = 0; gate < 4; ++gate) {
            const auto g = static_cast<std::size_t>(gate);
            for (double& w : w_in[g]) w = flat[at++];
            for (double& w : w_rec[g]) w = flat[at++];
            for (double& w : bias[g]) w = flat[at++];
        }
        for (double& w : out_weight) w = flat[at++];
        out_bias = flat[at];
    }

    double predict(std::span<const double> seq) const;
    struct LossGrad {
        double loss = 0.0;
        double prediction = 0.0;
        std::vector<double> grad;
    };
    LossGrad loss_and_grad(std::span<const double> seq, double target) const;
};

namespace detail {

struct LstmStepTrace {
    std::vector<double> x;             // [d]
    std::vector<double> h_prev;        // [h]
    std::vector<double> f, i, g, o;    // [h] post-activation
    std::vector<double> c, tanh_c, h;  // [h]
};

inline void lstm_step_trace(const ClassicalLstmModel& model, std::span<const double> x_t,
                            const std::vector<double>& h_prev, const std::vector<double>& c_prev,
                            LstmStepTrace& trace) {
    const std::size_t h = static_cast<std::size_t>(model.dims.hidden_dim);
    const std::size_t d = static_cast<std::size_t>(model.dims.input_dim);

    trace.x.assign(x_t.begin(), x_t.end());
    trace.h_prev = h_prev;

    std::array<std::vector<double>*, 4> gates{&trace.f, &trace.i, &trace.g, &trace.o};
    for (int gate = 0; gate < 4; ++gate) {
        const auto gi = static_cast<std::size_t>(gate);
        std::vector<double>& z = *gates[gi];
        z.assign(h, 0.0);
        for (std::size_t r = 0; r < h; ++r) {
            double acc = model.bias[gi][r];
            for (std::size_t col = 0; col < d; ++col)
                acc += model.w_in[gi][r * d + col] * x_t[col];
            for (std::size_t col = 0; col < h; ++col)
                acc += model.w_rec[gi][r * h + col] * h_prev[col];
            z[r] = acc;
        }
    }
    for (std::size_t r = 0; r < h; ++r) {
        trace.f[r] = sigmoid(trace.f[r]);
        trace.i[r] = sigmoid(trace.i[r]);
        trace.g[r] = std::tanh(trace.g[r]);
        trace.o[r] = sigmoid(trace.o[r]);
    }

    trace.c = cell_update(trace.i, trace.g, trace.f, c_prev);
    trace.tanh_c.resize(h);
    trace.h.resize(h);
    for (std::size_t r = 0; r < h; ++r) {
        trace.tanh_c[r] = std::tanh(trace.c[r]);
        trace.h[r] = trace.o[r] * trace.tanh_c[r];
        if (!std::isfinite(trace.c[r])) throw NumericError("lstm_step: non-finite cell state");
    }
}

}  // namespace detail

inline double lstm_forward_sequence(const ClassicalLstmModel& model, std::span<const double> seq) {
    model.dims.validate();
    const std::size_t d = static_cast<std::size_t>(model.dims.input_dim);
    if (seq.empty() || seq.size() % d != 0)
        throw ShapeError("lstm_forward_sequence: sequence length must be a positive multiple of input_dim");
    const std::size_t steps = seq.size() / d;
    const std::size_t h = static_cast<std::size_t>(model.dims.hidden_dim);

    std::vector<double> hidden(h, 0.0), cell(h, 0.0);
    detail::LstmStepTrace trace;
    for (std::size_t t = 0; t < steps; ++t) {
        detail::lstm_step_trace(model, seq.subspan(t * d, d), hidden, cell, trace);
        hidden = trace.h;
        cell = trace.c;
    }
    double y = model.out_bias;
    for (std::size_t r = 0; r < h; ++r) y += model.out_weight[r] * hidden[r];
    return y;
}

struct LstmGradients {
    std::array<std::vector<double>, 4> w_in, w_rec, bias;
    std::vector<double> out_weight;
    double out_bias = 0.0;
    double loss = 0.0;
    double prediction = 0.0;

    std::vector<double> flatten() const {
        std::vector<double> flat;
        for (int gate = 0; gate < 4; ++gate) {
            const auto g = static_cast<std::size_t>(gate);
            flat.insert(flat.end(), w_in[g].begin(), w_in[g].end());
            flat.insert(flat.end(), w_rec[g].begin(), w_rec[g].end());
            flat.insert(flat.end(), bias[g].begin(), bias[g].end());
        }
        flat.insert(flat.end(), out_weight.begin(), out_weight.end());
        flat.push_back(out_bias);
        return flat;
    }
};

inline LstmGradients lstm_backward_sequence(const ClassicalLstmModel& model,
                                            std::span<const double> seq, double target) {
    model.dims.validate();
    const std::size_t d = static_cast<std::size_t>(model.dims.input_dim);
    const std::size_t h = static_cast<std::size_t>(model.dims.hidden_dim);
    if (seq.empty() || seq.size() % d != 0)
        throw ShapeError("lstm_backward_sequence: sequence length must be a positive multiple of input_dim");
    const std::size_t steps = seq.size() / d;

    std::vector<detail::LstmStepTrace> traces(steps);
    std::vector<double> hidden(h, 0.0), cell(h, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        detail::lstm_step_trace(model, seq.subspan(t * d, d), hidden, cell, traces[t]);
        hidden = traces[t].h;
        cell = traces[t].c;
    }

    LstmGradients grad;
    for (int gate = 0; gate < 4; ++gate) {
        const auto g = static_cast<std::size_t>(gate);
        grad.w_in[g].assign(h * d, 0.0);
        grad.w_rec[g].assign(h * h, 0.0);
        grad.bias[g].assign(h, 0.0);
    }
    grad.out_weight.assign(h, 0.0);

    double y = model.out_bias;
    for (std::size_t r = 0; r < h; ++r) y += model.out_weight[r] * hidden[r];
    grad.prediction = y;
    const double residual = y - target;
    grad.loss = residual * residual;
    if (!std::isfinite(grad.loss)) throw NumericError("lstm_backward_sequence: non-finite loss");
    const double dy = 2.0 * residual;

    std::vector<double> dh(h), dc(h, 0.0), dz(h);
    grad.out_bias = dy;
    for (std::size_t r = 0; r < h; ++r) {
        grad.out_weight[r] = dy * hidden[r];
        dh[r] = dy * model.out_weight[r];
    }

    const std::vector<double> zero_cell(h, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        const detail::LstmStepTrace& trace = traces[t];
        const std::vector<double>& c_prev = t > 0 ? traces[t - 1].c : zero_cell;

        for (std::size_t r = 0; r < h; ++r)
            dc[r] += dh[r] * trace.o[r] * (1.0 - trace.tanh_c[r] * trace.tanh_c[r]);

        std::vector<double> dh_prev(h, 0.0);
        // Gate order f, i, g, o with their upstream signals and activations.
        for (int gate = 0; gate < 4; ++gate) {
            const auto gi = static_cast<std::size_t>(gate);
            for (std::size_t r = 0; r < h; ++r) {
                double dgate = 0.0, act = 0.0;
                switch (gate) {
                    case 0:
                        dgate = dc[r] * c_prev[r];
                        act = trace.f[r] * (1.0 - trace.f[r]);
                        break;
                    case 1:
                        dgate = dc[r] * trace.g[r];
                        act = trace.i[r] * (1.0 - trace.i[r]);
                        break;
                    case 2:
                        dgate = dc[r] * trace.i[r];
                        act = 1.0 - trace.g[r] * trace.g[r];
                        break;
                    case 3:
                        dgate = dh[r] * trace.tanh_c[r];
                        act = trace.o[r] * (1.0 - trace.o[r]);
                        break;
                }
                dz[r] = dgate * act;
            }
            for (std::size_t r = 0; r < h; ++r) {
                grad.bias[gi][r] += dz[r];
                for (std::size_t col = 0; col < d; ++col)
                    grad.w_in[gi][r * d + col] += dz[r] * trace.x[col];
                for (std::size_t col = 0; col < h; ++col)
                    grad.w_rec[gi][r * h + col] += dz[r] * trace.h_prev[col];
            }
            // Hidden carry through the transposed recurrent weights.
            for (std::size_t col = 0; col < h; ++col) {
                double acc = 0.0;
                for (std::size_t r = 0; r < h; ++r)
                    acc += model.w_rec[gi][r * h + col] * dz[r];
                dh_prev[col] += acc;
            }
        }

        for (std::size_t r = 0; r < h; ++r) dc[r] *= trace.f[r];
        dh = dh_prev;
    }

    return grad;
}

inline double ClassicalLstmModel::predict(std::span<const double> seq) const {
    return lstm_forward_sequence(*this, seq);
}

inline ClassicalLstmModel::LossGrad ClassicalLstmModel::loss_and_grad(std::span<const double> seq,
                                                                      double target) const {
    const LstmGradients g = lstm_backward_sequence(*this, seq, target);
    return {g.loss, g.prediction, g.flatten()};
}

}  // namespace fedqlstm
