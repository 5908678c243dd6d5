#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernel_detail.hpp"

namespace vts {

TransformParams TransformParams::identity(int channels, double eps) {
    const auto c = std::size_t(channels);
    TransformParams p;
    p.weight.assign(c * c, 0.0);
    for (std::size_t k = 0; k < c; ++k) p.weight[k * c + k] = 1.0;
    p.bias.assign(c, 0.0);
    p.bn_scale.assign(c, 1.0);
    p.bn_shift.assign(c, 0.0);
    p.bn_mean.assign(c, 0.0);
    p.bn_var.assign(c, 1.0);
    p.bn_eps = eps;
    return p;
}

void TransformParams::validate() const {
    const std::size_t c = bias.size();
    if (weight.size() != c * c || bn_scale.size() != c || bn_shift.size() != c || bn_mean.size() != c ||
        bn_var.size() != c) {
        throw ContractError("TransformParams: inconsistent sizes");
    }
    for (const auto* vec : {&weight, &bias, &bn_scale, &bn_shift, &bn_mean, &bn_var}) {
        for (double v : *vec) {
            if (!std::isfinite(v)) throw ContractError("TransformParams: non-finite value");
        }
    }
    for (double v : bn_var) {
        if (!(v > 0.0)) throw ContractError("TransformParams: bn_var must be strictly positive");
    }
    if (!(bn_eps >= 0.0)) throw ContractError("TransformParams: bn_eps must be non-negative");
}

namespace {
int g_threads = 0;
}

void set_worker_threads(int n) {
    g_threads = n > 0 ? n : 0;
#ifdef _OPENMP
    if (g_threads > 0) omp_set_num_threads(g_threads);
#endif
}

int worker_threads() {
#ifdef _OPENMP
    return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace vts

namespace vts::kernels::omp {

using namespace detail;

TensorGrid warp(const TensorGrid& grid, const FlowField& flow) {
    check_warp(grid, flow);
    TensorGrid out(grid.height(), grid.width(), grid.channels());
    const int h = grid.height();
    const int w = grid.width();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) warp_cell(grid, flow, out, y, x);
    return out;
}

TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p) {
    check_transform(grid, p);
    TensorGrid out(grid.height(), grid.width(), grid.channels());
    const int h = grid.height();
    const int w = grid.width();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) transform_cell(grid, p, out, y, x);
    return out;
}

TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b) {
    check_same(a, b, "similarity_energy: dimension mismatch");
    TensorGrid out(a.height(), a.width(), 1);
    const int h = a.height();
    const int w = a.width();
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(y, x) = float(dot_cell(a, b, y, x));
    return out;
}

std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims, std::span<const TensorGrid> confs) {
    check_window_maps(sims, confs, "aggregation_weights: inputs must be equal-length lists of same-shape 1-channel maps");
    const int h = sims[0].height();
    const int w = sims[0].width();
    std::vector<ScalarField> out(sims.size(), ScalarField{h, w, std::vector<double>(sims[0].size())});
    const auto n = std::int64_t(sims[0].size());
#pragma omp parallel
    {
        std::vector<double> scratch(sims.size());
#pragma omp for schedule(static)
        for (std::int64_t pos = 0; pos < n; ++pos) softmax_cell(sims, confs, out, std::size_t(pos), scratch);
    }
    return out;
}

ScalarField weighted_sum(std::span<const ScalarField> weights, std::span<const TensorGrid> confs) {
    check_weighted(weights, confs);
    ScalarField out{weights[0].height, weights[0].width, std::vector<double>(weights[0].values.size())};
    const auto n = std::int64_t(out.values.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t pos = 0; pos < n; ++pos) out.values[std::size_t(pos)] = weighted_cell(weights, confs, std::size_t(pos));
    return out;
}

TensorGrid mask_statistic(const TensorGrid& features) {
    const int h = features.height();
    const int w = features.width();
    std::vector<double> stat(std::size_t(h) * std::size_t(w));
    double lo = INFINITY;
    double hi = -INFINITY;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mean_abs_cell(features, y, x);
            stat[std::size_t(y) * std::size_t(w) + std::size_t(x)] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    TensorGrid out(h, w, 1);
    const auto n = std::int64_t(stat.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out.data()[std::size_t(i)] = normalize_stat(stat[std::size_t(i)], lo, hi);
    return out;
}

}  // namespace vts::kernels::omp
