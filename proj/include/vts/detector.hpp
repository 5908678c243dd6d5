#pragma once

#include <span>
#include <vector>

#include "vts/geometry.hpp"
#include "vts/kernels.hpp"
#include "vts/providers.hpp"
#include "vts/tensor.hpp"
#include "vts/types.hpp"

namespace vts::detector {

/// 2n+1 frames centred on `reference`. Entry i corresponds to offset i - n.
struct AggregationWindow {
    int n = 0;
    int reference = 0;
    std::vector<TensorGrid> features;
    std::vector<TensorGrid> confidences;
    std::vector<FlowField> flows;
    TransformParams transform;

    void validate() const;
};

struct DetectorConfig {
    double mask_threshold = 0.5;
    double conf_threshold = 0.8;
    double nms_threshold = 0.2;
    double cell_stride = 4.0;  ///< pixels per grid cell
};

[[nodiscard]] TensorGrid warp(const TensorGrid& grid, const FlowField& flow);
[[nodiscard]] TensorGrid transform_features(const TensorGrid& grid, const TransformParams& p);
[[nodiscard]] TensorGrid similarity_energy(const TensorGrid& a, const TensorGrid& b);
[[nodiscard]] std::vector<ScalarField> aggregation_weights(std::span<const TensorGrid> sims,
                                                           std::span<const TensorGrid> confs);

/// Intermediate maps of one aggregation, kept for inspection and tests.
struct AggregationTrace {
    std::vector<ScalarField> weights;
    ScalarField aggregated;  ///< C_agg before masking
    TensorGrid mask;         ///< binary M_t
};

/// Refined confidence C_ref = (sum_i a_i * warp(C_i)) * M_t.
/// Confidence maps are supplied in their own frame coordinates and are warped with the
/// same flow as the features.
[[nodiscard]] TensorGrid aggregate(const AggregationWindow& window, double mask_threshold = 0.5,
                                   AggregationTrace* trace = nullptr);

/// Thresholds `conf`, emits each surviving cell's quad (cell centre + offsets) and applies NMS.
[[nodiscard]] std::vector<ScoredQuad> extract_quads(const TensorGrid& conf, const TensorGrid& geometry,
                                                    double conf_threshold, double nms_threshold = 0.2,
                                                    double cell_stride = 4.0);

/// Assembles the window around `reference`. Frame indices outside the video are clamped,
/// so border windows repeat the edge frame with its own flow.
[[nodiscard]] AggregationWindow build_window(const FrameProvider& frames, const FlowProvider& flows, int reference,
                                             int n, const TransformParams& transform);

/// Full detection for every frame of a video, in frame order.
[[nodiscard]] std::vector<Detection> detect_video(const FrameProvider& frames, const FlowProvider& flows, int n,
                                                  const TransformParams& transform, const DetectorConfig& cfg);

}  // namespace vts::detector
