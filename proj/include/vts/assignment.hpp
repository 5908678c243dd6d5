#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace vts {

/// Row-major dense cost matrix.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    CostMatrix(std::initializer_list<std::initializer_list<double>> init);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Entries at or above this value mark forbidden pairs.
inline constexpr double kForbiddenCost = std::numeric_limits<double>::infinity();

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

/// Minimum-cost one-to-one assignment (Hungarian / shortest augmenting path). Rectangular
/// matrices are padded. Among assignments the number of non-forbidden pairs is maximized
/// first, then total cost minimized. Forbidden pairs never appear in the result. Pairs are
/// returned sorted by row.
[[nodiscard]] Assignment assign(const CostMatrix& cost);

/// Sum of cost(r, c) over the pairs, in the given order.
[[nodiscard]] double assignment_cost(const CostMatrix& cost, const Assignment& a);

}  // namespace vts
