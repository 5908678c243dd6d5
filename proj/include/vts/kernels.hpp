#pragma once

// Data-parallel inner loops of the spatial-temporal detector. `serial` holds the
// reference implementations used by tests and the benchmark; `omp` holds the
// OpenMP versions used by the pipeline. Both produce bit-identical results.

#include <span>
#include <vector>

#include "vts/tensor.hpp"

namespace vts {

/// Parameters of the feature transform ReLU(BN(W f + b)).
struct TransformParams {
    std::vector<double> weight;  ///< c x c, row-major
    std::vector<double> bias;
    std::vector<double> bn_scale;
    std::vector<double> bn_shift;
    std::vector<double> bn_mean;
    std::vector<double> bn_var;
    double bn_eps = 1e-5;

    [[nodiscard]] int channels() const noexcept { return int(bias.size()); }
    /// Identity W, zero b, identity BN.
    static TransformParams identity(int channels, double eps = 1e-5);
    /// Throws ContractError on inconsistent sizes, non-finite values or non-positive variance.
    void validate() const;
};

/// Single-channel double-precision map; holds aggregation weights, which must sum to one
/// tighter than float resolution allows.
struct ScalarField {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    [[nodiscard]] double at(int y, int x) const { return values[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
};

namespace kernels {

namespace serial {
[[nodiscard]] TensorGrid warp(const TensorGrid& grid, const FlowField& flow);
[[nodiscard]] TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p);
[[nodiscard]] TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b);
[[nodiscard]] std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims,
                                                           std::span<const TensorGrid> confs);
[[nodiscard]] ScalarField weighted_sum(std::span<const ScalarField> weights, std::span<const TensorGrid> confs);
/// Mean absolute channel activation, min-max normalized over the frame. A constant map
/// normalizes to all ones.
[[nodiscard]] TensorGrid mask_statistic(const TensorGrid& features);
}  // namespace serial

namespace omp {
[[nodiscard]] TensorGrid warp(const TensorGrid& grid, const FlowField& flow);
[[nodiscard]] TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p);
[[nodiscard]] TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b);
[[nodiscard]] std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims,
                                                           std::span<const TensorGrid> confs);
[[nodiscard]] ScalarField weighted_sum(std::span<const ScalarField> weights, std::span<const TensorGrid> confs);
[[nodiscard]] TensorGrid mask_statistic(const TensorGrid& features);
}  // namespace omp

}  // namespace kernels

/// Caps the OpenMP worker count for subsequent parallel regions. n <= 0 restores the default.
void set_worker_threads(int n);
[[nodiscard]] int worker_threads();

}  // namespace vts
