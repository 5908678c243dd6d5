#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "vts/errors.hpp"
#include "vts/kernels.hpp"

namespace vts::kernels::detail {

inline void require(bool ok, const char* what) {
    if (!ok) throw ContractError(what);
}

inline void check_warp(const TensorGrid& g, const FlowField& f) {
    require(g.height() == f.height && g.width() == f.width, "warp: grid and flow dimensions differ");
    require(f.dx.size() == f.dy.size() && f.dx.size() == std::size_t(f.height) * std::size_t(f.width),
            "warp: flow arrays do not match its dimensions");
}

/// Bilinear sample of channel `ch` at (sx, sy) with clamp-to-edge.
inline double sample(const TensorGrid& g, double sx, double sy, int ch) {
    const double cx = std::clamp(sx, 0.0, double(g.width() - 1));
    const double cy = std::clamp(sy, 0.0, double(g.height() - 1));
    const int x0 = int(std::floor(cx));
    const int y0 = int(std::floor(cy));
    const int x1 = std::min(x0 + 1, g.width() - 1);
    const int y1 = std::min(y0 + 1, g.height() - 1);
    const double fx = cx - double(x0);
    const double fy = cy - double(y0);
    const double top = (1.0 - fx) * double(g.at(y0, x0, ch)) + fx * double(g.at(y0, x1, ch));
    const double bot = (1.0 - fx) * double(g.at(y1, x0, ch)) + fx * double(g.at(y1, x1, ch));
    return (1.0 - fy) * top + fy * bot;
}

inline void warp_cell(const TensorGrid& g, const FlowField& f, TensorGrid& out, int y, int x) {
    const std::size_t k = f.index(y, x);
    const double sx = double(x) + double(f.dx[k]);
    const double sy = double(y) + double(f.dy[k]);
    for (int ch = 0; ch < g.channels(); ++ch) out.at(y, x, ch) = float(sample(g, sx, sy, ch));
}

inline void check_transform(const TensorGrid& g, const TransformParams& p) {
    p.validate();
    require(g.channels() == p.channels(), "transform_features: channel count differs from parameters");
}

inline void transform_cell(const TensorGrid& g, const TransformParams& p, TensorGrid& out, int y, int x) {
    const int c = g.channels();
    const auto in = g.cell(y, x);
    auto dst = out.cell(y, x);
    for (int k = 0; k < c; ++k) {
        double lin = p.bias[std::size_t(k)];
        for (int j = 0; j < c; ++j) lin += p.weight[std::size_t(k * c + j)] * double(in[std::size_t(j)]);
        const double bn = p.bn_scale[std::size_t(k)] * (lin - p.bn_mean[std::size_t(k)]) /
                              std::sqrt(p.bn_var[std::size_t(k)] + p.bn_eps) +
                          p.bn_shift[std::size_t(k)];
        dst[std::size_t(k)] = float(std::max(0.0, bn));
    }
}

inline void check_same(const TensorGrid& a, const TensorGrid& b, const char* what) {
    require(a.same_shape(b), what);
}

inline double dot_cell(const TensorGrid& a, const TensorGrid& b, int y, int x) {
    const auto va = a.cell(y, x);
    const auto vb = b.cell(y, x);
    double s = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) s += double(va[k]) * double(vb[k]);
    return s;
}

inline void check_window_maps(std::span<const TensorGrid> a, std::span<const TensorGrid> b, const char* what) {
    require(!a.empty() && a.size() == b.size(), what);
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i].channels() == 1 && b[i].channels() == 1, what);
        require(a[i].same_shape(a[0]) && b[i].same_shape(a[0]), what);
    }
}

/// Softmax of sims[i]*confs[i] over i at one position, written into `weights`.
inline void softmax_cell(std::span<const TensorGrid> sims, std::span<const TensorGrid> confs,
                         std::span<ScalarField> weights, std::size_t pos, std::span<double> scratch) {
    const std::size_t n = sims.size();
    double mx = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = double(sims[i].data()[pos]) * double(confs[i].data()[pos]);
        mx = std::max(mx, scratch[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = std::exp(scratch[i] - mx);
        z += scratch[i];
    }
    for (std::size_t i = 0; i < n; ++i) weights[i].values[pos] = scratch[i] / z;
}

inline void check_weighted(std::span<const ScalarField> w, std::span<const TensorGrid> c) {
    require(!w.empty() && w.size() == c.size(), "weighted_sum: list lengths differ");
    for (std::size_t i = 0; i < w.size(); ++i) {
        require(c[i].channels() == 1 && c[i].height() == w[i].height && c[i].width() == w[i].width &&
                    w[i].values.size() == c[i].size(),
                "weighted_sum: dimension mismatch");
    }
}

inline double weighted_cell(std::span<const ScalarField> w, std::span<const TensorGrid> c, std::size_t pos) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i].values[pos] * double(c[i].data()[pos]);
    return s;
}

inline double mean_abs_cell(const TensorGrid& f, int y, int x) {
    const auto v = f.cell(y, x);
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (float e : v) s += std::abs(double(e));
    return s / double(v.size());
}

inline float normalize_stat(double v, double lo, double hi) {
    if (!(hi > lo)) return 1.0F;
    return float((v - lo) / (hi - lo));
}

}  // namespace vts::kernels::detail
