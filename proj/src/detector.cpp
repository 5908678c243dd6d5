#include "vts/detector.hpp"

#include <algorithm>
#include <string>

#include "vts/errors.hpp"

namespace vts::detector {

void AggregationWindow::validate() const {
    const std::size_t len = std::size_t(2 * n + 1);
    if (n < 0) throw ContractError("window: n must be non-negative");
    if (features.size() != len || confidences.size() != len || flows.size() != len) {
        throw ContractError("window: expected " + std::to_string(len) + " entries in every list");
    }
    const TensorGrid& ref = features[std::size_t(n)];
    for (std::size_t i = 0; i < len; ++i) {
        if (features[i].height() != ref.height() || features[i].width() != ref.width() ||
            features[i].channels() != ref.channels()) {
            throw ContractError("window: feature maps differ in shape");
        }
        if (confidences[i].channels() != 1 || confidences[i].height() != ref.height() ||
            confidences[i].width() != ref.width()) {
            throw ContractError("window: confidence maps must be 1-channel and match the features");
        }
    }
    const auto& f0 = flows[std::size_t(n)];
    if (std::any_of(f0.dx.begin(), f0.dx.end(), [](float v) { return v != 0.0F; }) ||
        std::any_of(f0.dy.begin(), f0.dy.end(), [](float v) { return v != 0.0F; })) {
        throw ContractError("window: reference flow must be zero");
    }
}

TensorGrid warp(const TensorGrid& grid, const FlowField& flow) {
    return kernels::omp::warp(grid, flow);
}

TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p) {
    return kernels::omp::transform_features(grid, p);
}

TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b) {
    return kernels::omp::similarity_energy(a, b);
}

std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims, std::span<const TensorGrid> confs) {
    return kernels::omp::aggregation_weights(sims, confs);
}

TensorGrid aggregate(const AggregationWindow& window, double mask_threshold, AggregationTrace* trace) {
    window.validate();
    const std::size_t len = window.features.size();
    const std::size_t ref = std::size_t(window.n);

    std::vector<TensorGrid> warped(len);
    std::vector<TensorGrid> confs(len);
    for (std::size_t i = 0; i < len; ++i) {
        warped[i] = warp(window.features[i], window.flows[i]);
        confs[i] = warp(window.confidences[i], window.flows[i]);
    }
    std::vector<TensorGrid> trans(len);
    for (std::size_t i = 0; i < len; ++i) trans[i] = transform_features(warped[i], window.transform);
    std::vector<TensorGrid> sims(len);
    for (std::size_t i = 0; i < len; ++i) sims[i] = similarity_energy(trans[i], trans[ref]);

    auto weights = aggregation_weights(sims, confs);
    auto agg = kernels::omp::weighted_sum(weights, confs);
    const TensorGrid stat = kernels::omp::mask_statistic(warped[ref]);

    TensorGrid mask(stat.height(), stat.width(), 1);
    TensorGrid out(stat.height(), stat.width(), 1);
    for (std::size_t p = 0; p < out.size(); ++p) {
        const bool on = double(stat.data()[p]) >= mask_threshold;
        mask.data()[p] = on ? 1.0F : 0.0F;
        out.data()[p] = on ? float(agg.values[p]) : 0.0F;
    }
    if (trace != nullptr) {
        trace->weights = std::move(weights);
        trace->aggregated = std::move(agg);
        trace->mask = std::move(mask);
    }
    return out;
}

std::vector<ScoredQuad> extract_quads(const TensorGrid& conf, const TensorGrid& geometry, double conf_threshold,
                                      double nms_threshold, double cell_stride) {
    if (conf.channels() != 1 || geometry.channels() != 8 || conf.height() != geometry.height() ||
        conf.width() != geometry.width()) {
        throw ContractError("extract_quads: geometry must be an 8-channel grid matching the confidence map");
    }
    std::vector<ScoredQuad> candidates;
    for (int y = 0; y < conf.height(); ++y) {
        for (int x = 0; x < conf.width(); ++x) {
            const double c = conf.at(y, x);
            if (c < conf_threshold) continue;
            const double cx = (double(x) + 0.5) * cell_stride;
            const double cy = (double(y) + 0.5) * cell_stride;
            const auto g = geometry.cell(y, x);
            std::array<double, 8> xy{};
            for (std::size_t k = 0; k < 4; ++k) {
                xy[2 * k] = cx + double(g[2 * k]);
                xy[2 * k + 1] = cy + double(g[2 * k + 1]);
            }
            candidates.push_back({Quad::from_coords(xy), std::clamp(c, 0.0, 1.0)});
        }
    }
    if (candidates.empty()) return {};
    return nms(candidates, nms_threshold);
}

AggregationWindow build_window(const FrameProvider& frames, const FlowProvider& flows, int reference, int n,
                               const TransformParams& transform) {
    if (n < 0) throw ContractError("window: n must be non-negative");
    const int last = frames.frame_count() - 1;
    if (reference < 0 || reference > last) throw ContractError("window: reference frame outside the video");
    AggregationWindow w;
    w.n = n;
    w.reference = reference;
    w.transform = transform;
    for (int i = -n; i <= n; ++i) {
        const int src = std::clamp(reference + i, 0, last);
        auto f = frames.features(src);
        w.flows.push_back(flows.flow(src, reference, f.height(), f.width()));
        w.features.push_back(std::move(f));
        w.confidences.push_back(frames.confidence(src));
    }
    return w;
}

std::vector<Detection> detect_video(const FrameProvider& frames, const FlowProvider& flows, int n,
                                    const TransformParams& transform, const DetectorConfig& cfg) {
    std::vector<Detection> out;
    for (int t = 0; t < frames.frame_count(); ++t) {
        const auto window = build_window(frames, flows, t, n, transform);
        const auto refined = aggregate(window, cfg.mask_threshold);
        for (auto& q : extract_quads(refined, frames.geometry(t), cfg.conf_threshold, cfg.nms_threshold,
                                     cfg.cell_stride)) {
            out.push_back({t, std::move(q)});
        }
    }
    return out;
}

}  // namespace vts::detector
