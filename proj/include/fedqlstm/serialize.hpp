#pragma once

#include <string>

#include <json.hpp>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/lstm.hpp"
#include "fedqlstm/qlstm.hpp"

namespace fedqlstm {

// Model files are a flat list of named real tensors plus the dimension plan,
// tagged with a format version. This is the unit the federated layer ships,
// so the layout is append-only: existing names and meanings never change.

inline constexpr const char* kModelFormat = "fedqlstm.model.v1";

namespace detail {

inline nlohmann::json tensors_to_json(const ParamLayout& layout,
                                      const std::vector<double>& flat) {
    nlohmann::json tensors = nlohmann::json::object();
    std::size_t at = 0;
    for (const auto& [name, size] : layout.tensors) {
        tensors[name] = std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(at),
                                            flat.begin() + static_cast<std::ptrdiff_t>(at + size));
        at += size;
    }
    return tensors;
}

inline std::vector<double> tensors_from_json(const ParamLayout& layout,
                                             const nlohmann::json& tensors) {
    std::vector<double> flat;
    flat.reserve(layout.total());
    for (const auto& [name, size] : layout.tensors) {
        if (!tensors.contains(name))
            throw ShapeError("model file: missing tensor '" + name + "'");
        const auto values = tensors.at(name).get<std::vector<double>>();
        if (values.size() != size)
            throw ShapeError("model file: tensor '" + name + "' has " +
                             std::to_string(values.size()) + " entries, expected " +
                             std::to_string(size));
        flat.insert(flat.end(), values.begin(), values.end());
    }
    return flat;
}

inline void check_format(const nlohmann::json& j, const std::string& kind) {
    if (j.value("format", "") != kModelFormat)
        throw ShapeError("model file: unknown format tag");
    if (j.value("kind", "") != kind)
        throw ShapeError("model file: expected kind '" + kind + "', got '" +
                         j.value("kind", "") + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const QlstmModel& model) {
    return {{"format", kModelFormat},
            {"kind", "qlstm"},
            {"dims",
             {{"input_dim", model.dims.input_dim},
              {"hidden_dim", model.dims.hidden_dim},
              {"num_qubits", model.dims.num_qubits},
              {"num_layers", model.dims.num_layers}}},
            {"tensors", detail::tensors_to_json(model.param_layout(), model.flat_params())}};
}

inline QlstmModel qlstm_from_json(const nlohmann::json& j) {
    detail::check_format(j, "qlstm");
    const auto& d = j.at("dims");
    QlstmDims dims{d.at("input_dim").get<int>(), d.at("hidden_dim").get<int>(),
                   d.at("num_qubits").get<int>(), d.at("num_layers").get<int>()};
    QlstmModel model = QlstmModel::zeros(dims);
    model.set_flat_params(detail::tensors_from_json(model.param_layout(), j.at("tensors")));
    return model;
}

inline nlohmann::json to_json(const ClassicalLstmModel& model) {
    return {{"format", kModelFormat},
            {"kind", "classical_lstm"},
            {"dims",
             {{"input_dim", model.dims.input_dim}, {"hidden_dim", model.dims.hidden_dim}}},
            {"tensors", detail::tensors_to_json(model.param_layout(), model.flat_params())}};
}

inline ClassicalLstmModel lstm_from_json(const nlohmann::json& j) {
    detail::check_format(j, "classical_lstm");
    const auto& d = j.at("dims");
    const LstmDims dims{d.at("input_dim").get<int>(), d.at("hidden_dim").get<int>()};
    ClassicalLstmModel model = ClassicalLstmModel::zeros(dims);
    model.set_flat_params(detail::tensors_from_json(model.param_layout(), j.at("tensors")));
    return model;
}

}  // namespace fedqlstm
