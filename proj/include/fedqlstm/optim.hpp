#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/params.hpp"

namespace fedqlstm {

enum class OptimizerKind { SGD, RMSprop, Adam };

inline std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::SGD: return "sgd";
        case OptimizerKind::RMSprop: return "rmsprop";
        case OptimizerKind::Adam: return "adam";
    }
    return "?";
}

inline OptimizerKind optimizer_kind_from_string(const std::string& s) {
    if (s == "sgd") return OptimizerKind::SGD;
    if (s == "rmsprop") return OptimizerKind::RMSprop;
    if (s == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer '" + s + "' (expected sgd, rmsprop or adam)");
}

struct OptimizerHyper {
    double rmsprop_alpha = 0.99;
    double eps = 1e-8;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
};

// Per-parameter-vector optimizer state. One instance per client; moments are
// sized lazily on the first step.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double lr, OptimizerHyper hyper = {})
        : kind_(kind), lr_(lr), hyper_(hyper) {
        if (lr < 0.0) throw ConfigError("Optimizer: learning rate must be >= 0");
    }

    OptimizerKind kind() const { return kind_; }
    double lr() const { return lr_; }
    long step_count() const { return steps_; }

    void step(std::vector<double>& params, const std::vector<double>& grads,
              const ParamLayout* layout = nullptr) {
        if (grads.size() != params.size())
            throw ShapeError("Optimizer::step: gradient size " + std::to_string(grads.size()) +
                             " != parameter size " + std::to_string(params.size()));
        for (std::size_t i = 0; i < grads.size(); ++i)
            if (!std::isfinite(grads[i]))
                throw NumericError("Optimizer::step: non-finite gradient at " +
                                   (layout ? layout->name_of(i) : "param[" + std::to_string(i) + "]"));

        ensure_moments(params.size());
        ++steps_;
        switch (kind_) {
            case OptimizerKind::SGD:
                for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grads[i];
                break;
            case OptimizerKind::RMSprop:
                for (std::size_t i = 0; i < params.size(); ++i) {
                    m2_[i] = hyper_.rmsprop_alpha * m2_[i] +
                             (1.0 - hyper_.rmsprop_alpha) * grads[i] * grads[i];
                    params[i] -= lr_ * grads[i] / (std::sqrt(m2_[i]) + hyper_.eps);
                }
                break;
            case OptimizerKind::Adam: {
                const double bc1 = 1.0 - std::pow(hyper_.adam_beta1, static_cast<double>(steps_));
                const double bc2 = 1.0 - std::pow(hyper_.adam_beta2, static_cast<double>(steps_));
                for (std::size_t i = 0; i < params.size(); ++i) {
                    m1_[i] = hyper_.adam_beta1 * m1_[i] + (1.0 - hyper_.adam_beta1) * grads[i];
                    m2_[i] = hyper_.adam_beta2 * m2_[i] +
                             (1.0 - hyper_.adam_beta2) * grads[i] * grads[i];
                    params[i] -= lr_ * (m1_[i] / bc1) / (std::sqrt(m2_[i] / bc2) + hyper_.eps);
                }
                break;
            }
        }
    }

private:
    void ensure_moments(std::size_t n) {
        if (kind_ == OptimizerKind::SGD) return;
        if (m2_.size() != n) m2_.assign(n, 0.0);
        if (kind_ == OptimizerKind::Adam && m1_.size() != n) m1_.assign(n, 0.0);
    }

    OptimizerKind kind_;
    double lr_;
    OptimizerHyper hyper_;
    std::vector<double> m1_, m2_;
    long steps_ = 0;
};

}  // namespace fedqlstm
