#include <vector>

#include "kernel_detail.hpp"

namespace vts::kernels::serial {

using namespace detail;

TensorGrid warp(const TensorGrid& grid, const FlowField& flow) {
    check_warp(grid, flow);
    TensorGrid out(grid.height(), grid.width(), grid.channels());
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x) warp_cell(grid, flow, out, y, x);
    return out;
}

TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p) {
    check_transform(grid, p);
    TensorGrid out(grid.height(), grid.width(), grid.channels());
    for (int y = 0; y < grid.height(); ++y)
        for (int x = 0; x < grid.width(); ++x) transform_cell(grid, p, out, y, x);
    return out;
}

TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b) {
    check_same(a, b, "similarity_energy: dimension mismatch");
    TensorGrid out(a.height(), a.width(), 1);
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) out.at(y, x) = float(dot_cell(a, b, y, x));
    return out;
}

std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims, std::span<const TensorGrid> confs) {
    check_window_maps(sims, confs, "aggregation_weights: inputs must be equal-length lists of same-shape 1-channel maps");
    const int h = sims[0].height();
    const int w = sims[0].width();
    std::vector<ScalarField> out(sims.size(), ScalarField{h, w, std::vector<double>(sims[0].size())});
    std::vector<double> scratch(sims.size());
    for (std::size_t pos = 0; pos < sims[0].size(); ++pos) softmax_cell(sims, confs, out, pos, scratch);
    return out;
}

ScalarField weighted_sum(std::span<const ScalarField> weights, std::span<const TensorGrid> confs) {
    check_weighted(weights, confs);
    ScalarField out{weights[0].height, weights[0].width, std::vector<double>(weights[0].values.size())};
    for (std::size_t pos = 0; pos < out.values.size(); ++pos) out.values[pos] = weighted_cell(weights, confs, pos);
    return out;
}

TensorGrid mask_statistic(const TensorGrid& features) {
    const int h = features.height();
    const int w = features.width();
    std::vector<double> stat(std::size_t(h) * std::size_t(w));
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mean_abs_cell(features, y, x);
            stat[std::size_t(y) * std::size_t(w) + std::size_t(x)] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    TensorGrid out(h, w, 1);
    for (std::size_t i = 0; i < stat.size(); ++i) out.data()[i] = normalize_stat(stat[i], lo, hi);
    return out;
}

}  // namespace vts::kernels::serial
