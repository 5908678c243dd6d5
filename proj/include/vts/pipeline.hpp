#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vts/config.hpp"
#include "vts/metrics.hpp"
#include "vts/simkit.hpp"
#include "vts/types.hpp"

namespace vts::pipeline {

struct DetectResult {
    std::vector<Detection> detections;
    std::vector<int> per_frame;  ///< detection count per frame
};

/// Reads frames (and flows, when configured), detects every frame and writes
/// `detections.tsv` under paths.out.
DetectResult cmd_detect(const RunConfig& cfg, std::ostream& log);

struct SpotResult {
    std::vector<TextStream> streams;           ///< with teacher and student scores filled in
    std::vector<StreamDecision> decisions;     ///< one per stream, ascending stream id
    std::map<std::string, std::string> manifest;
    long regions_total = 0;
    long recognitions_consumed = 0;
};

/// Transcript of the GT stream each tracked stream overlaps most (IoU >= threshold, per
/// frame votes; ties go to the smaller GT id). Streams without a match are absent.
[[nodiscard]] std::map<int, std::string> stream_transcripts(std::span<const TextStream> streams,
                                                            std::span<const GroundTruthRecord> gt,
                                                            double iou_threshold);

/// Keeps the observations overlapping a detection of the same frame at IoU >= threshold.
[[nodiscard]] std::vector<RegionObservation> gate_by_detections(std::span<const RegionObservation> obs,
                                                                std::span<const Detection> dets, double iou_threshold);

/// In-memory core of `spot`: track, score and select. When `student` is null, a ridge
/// student is fitted on this input's teacher scores and returned through `fitted`.
SpotResult spot(std::span<const RegionObservation> observations, std::span<const GroundTruthRecord> gt,
                const RunConfig& cfg, const quality::RidgeStudent* student, quality::RidgeStudent* fitted,
                std::ostream& log);

/// Writes streams.tsv, decisions.tsv, manifest.txt and, when fitted here, student.json.
SpotResult cmd_spot(const RunConfig& cfg, std::ostream& log);

/// Writes report.txt (key=value) under paths.out and prints the summary.
metrics::EvalReport cmd_eval(const RunConfig& cfg, std::ostream& log);

/// Generates a scenario from paths.scenario (or defaults) with cfg.seed and writes it to paths.out.
simkit::Scenario cmd_sim(const RunConfig& cfg, std::ostream& log);

/// Caps OpenMP workers from the VTS_THREADS environment variable, if set.
void apply_thread_env();

}  // namespace vts::pipeline
