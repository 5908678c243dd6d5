#include "vts/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vts/errors.hpp"

namespace vts {

TensorGrid::TensorGrid(int height, int width, int channels, float fill)
    : TensorGrid(height, width, channels,
                 std::vector<float>(std::size_t(std::max(height, 0)) * std::size_t(std::max(width, 0)) *
                                        std::size_t(std::max(channels, 0)),
                                    fill)) {}

TensorGrid::TensorGrid(int height, int width, int channels, std::vector<float> data)
    : h_(height), w_(width), c_(channels), data_(std::move(data)) {
    if (h_ < 0 || w_ < 0 || c_ < 0) throw ContractError("TensorGrid: negative dimension");
    if (data_.size() != std::size_t(h_) * std::size_t(w_) * std::size_t(c_)) {
        throw ContractError("TensorGrid: data length " + std::to_string(data_.size()) + " != h*w*c");
    }
    for (float v : data_) {
        if (!std::isfinite(v)) throw ContractError("TensorGrid: non-finite value");
    }
}

FlowField FlowField::zero(int height, int width) {
    return uniform(height, width, 0.0F, 0.0F);
}

FlowField FlowField::uniform(int height, int width, float dx, float dy) {
    const std::size_t n = std::size_t(height) * std::size_t(width);
    return FlowField{height, width, std::vector<float>(n, dx), std::vector<float>(n, dy)};
}

}  // namespace vts
