#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace fedqlstm {

// Names the tensors inside a flat parameter vector, in order. Used for model
// serialization and to turn a flat index into a readable name in error
// messages.
struct ParamLayout {
    std::vector<std::pair<std::string, std::size_t>> tensors;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [name, size] : tensors) n += size;
        return n;
    }

    std::string name_of(std::size_t flat_index) const {
        std::size_t offset = 0;
        for (const auto& [name, size] : tensors) {
            if (flat_index < offset + size)
                return name + "[" + std::to_string(flat_index - offset) + "]";
            offset += size;
        }
        return "param[" + std::to_string(flat_index) + "]";
    }
};

}  // namespace fedqlstm
