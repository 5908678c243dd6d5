#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vts {

/// Dense row-major h x w x c grid of 32-bit floats (feature or confidence map).
class TensorGrid {
public:
    TensorGrid() = default;
    TensorGrid(int height, int width, int channels, float fill = 0.0F);
    TensorGrid(int height, int width, int channels, std::vector<float> data);

    [[nodiscard]] int height() const noexcept { return h_; }
    [[nodiscard]] int width() const noexcept { return w_; }
    [[nodiscard]] int channels() const noexcept { return c_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool same_shape(const TensorGrid& o) const noexcept {
        return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
    }

    [[nodiscard]] float& at(int y, int x, int ch = 0) { return data_[index(y, x, ch)]; }
    [[nodiscard]] float at(int y, int x, int ch = 0) const { return data_[index(y, x, ch)]; }
    [[nodiscard]] std::span<float> cell(int y, int x) { return {data_.data() + index(y, x, 0), std::size_t(c_)}; }
    [[nodiscard]] std::span<const float> cell(int y, int x) const {
        return {data_.data() + index(y, x, 0), std::size_t(c_)};
    }

    [[nodiscard]] std::span<float> data() noexcept { return data_; }
    [[nodiscard]] std::span<const float> data() const noexcept { return data_; }

    friend bool operator==(const TensorGrid&, const TensorGrid&) = default;

private:
    [[nodiscard]] std::size_t index(int y, int x, int ch) const noexcept {
        return (std::size_t(y) * std::size_t(w_) + std::size_t(x)) * std::size_t(c_) + std::size_t(ch);
    }

    int h_ = 0;
    int w_ = 0;
    int c_ = 0;
    std::vector<float> data_;
};

/// Per-cell displacement (in cells) from reference-frame coordinates to source-frame
/// sample coordinates.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<float> dx;
    std::vector<float> dy;

    static FlowField zero(int height, int width);
    static FlowField uniform(int height, int width, float dx, float dy);

    [[nodiscard]] std::size_t index(int y, int x) const noexcept { return std::size_t(y) * std::size_t(width) + std::size_t(x); }
    friend bool operator==(const FlowField&, const FlowField&) = default;
};

}  // namespace vts
