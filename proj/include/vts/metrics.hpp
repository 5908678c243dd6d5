#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vts/types.hpp"

namespace vts::metrics {

enum class TranscriptMatch { Exact, CaseInsensitive };

struct MatchingConfig {
    double iou_threshold = 0.5;
    TranscriptMatch transcript_match = TranscriptMatch::Exact;
    void validate() const;
};

[[nodiscard]] bool transcripts_match(const std::string& a, const std::string& b, TranscriptMatch mode);

/// p/(q) with 0/0 = 0.
[[nodiscard]] double ratio(double num, double den) noexcept;
/// Harmonic mean, 0 when both are 0.
[[nodiscard]] double harmonic(double p, double r) noexcept;

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

struct DetectionCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    DetectionCounts& operator+=(const DetectionCounts& o);
    [[nodiscard]] PRF rates() const;
};

/// Per-frame greedy one-to-one matching by descending IoU at the threshold.
[[nodiscard]] DetectionCounts detection_counts(std::span<const Detection> dets, std::span<const GroundTruthRecord> gt,
                                               const MatchingConfig& cfg);
[[nodiscard]] PRF detection_prf(std::span<const Detection> dets, std::span<const GroundTruthRecord> gt,
                                const MatchingConfig& cfg);

struct TrackingCounts {
    long matches = 0;
    double iou_sum = 0.0;
    long fp = 0;
    long fn = 0;
    long id_switches = 0;
    long gt_objects = 0;
    double ata_overlap_sum = 0.0;
    long gt_streams = 0;
    long pred_streams = 0;
    TrackingCounts& operator+=(const TrackingCounts& o);
};

struct TrackingScores {
    double motp = 0.0;
    double mota = 0.0;
    double ata = 0.0;
};

[[nodiscard]] TrackingScores tracking_scores(const TrackingCounts& c);

/// CLEAR-MOT (MOTP as mean IoU, MOTA with identity switches) and VACE ATA.
[[nodiscard]] TrackingCounts tracking_counts(std::span<const TextStream> pred, std::span<const GroundTruthRecord> gt,
                                             const MatchingConfig& cfg);
[[nodiscard]] TrackingScores tracking_metrics(std::span<const TextStream> pred, std::span<const GroundTruthRecord> gt,
                                              const MatchingConfig& cfg);

struct SelectionCounts {
    long qshr_hits = 0;
    long qshr_streams = 0;
    long qshr_excluded = 0;  ///< mapped GT stream has no "high" record
    long rcr_hits = 0;
    long rcr_streams = 0;
    long unmatched_decisions = 0;
    SelectionCounts& operator+=(const SelectionCounts& o);
};

/// GT stream id hit by a decision: the record at the chosen frame with the largest IoU at
/// or above the threshold (ties: lower id).
[[nodiscard]] std::optional<int> map_decision(const StreamDecision& d, std::span<const GroundTruthRecord> gt,
                                              const MatchingConfig& cfg);

[[nodiscard]] SelectionCounts selection_counts(std::span<const StreamDecision> decisions,
                                               std::span<const GroundTruthRecord> gt, const MatchingConfig& cfg);
[[nodiscard]] double qshr(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
                          const MatchingConfig& cfg = {});
[[nodiscard]] double rcr(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
                         const MatchingConfig& cfg = {});

struct EndToEndCounts {
    long n_r = 0;
    long n_g = 0;
    long n_d = 0;
    EndToEndCounts& operator+=(const EndToEndCounts& o);
    [[nodiscard]] PRF rates() const;  ///< (PRE_s, REC_s, F-score)
};

/// True iff `d` may recall GT stream `gt_id`: text matches, frame lies within the stream's
/// annotated span, and IoU with its record at that frame reaches the threshold.
[[nodiscard]] bool recalls(const StreamDecision& d, int gt_id, std::span<const GroundTruthRecord> gt,
                           const MatchingConfig& cfg);

/// Sequence-level matching; each GT stream is credited at most once. Uses a maximum
/// matching visited in ascending decision stream id.
[[nodiscard]] EndToEndCounts end_to_end_counts(std::span<const StreamDecision> decisions,
                                               std::span<const GroundTruthRecord> gt, const MatchingConfig& cfg);
[[nodiscard]] PRF end_to_end(std::span<const StreamDecision> decisions, std::span<const GroundTruthRecord> gt,
                             const MatchingConfig& cfg = {});

[[nodiscard]] double speedup_ratio(long regions_total, long recognitions_consumed);

struct EvalCounts {
    DetectionCounts detection;
    TrackingCounts tracking;
    SelectionCounts selection;
    EndToEndCounts end_to_end;
    long recognitions_consumed = 0;
    long regions_total = 0;
    EvalCounts& operator+=(const EvalCounts& o);
};

struct EvalReport {
    double det_precision = 0.0;
    double det_recall = 0.0;
    double det_f = 0.0;
    double motp = 0.0;
    double mota = 0.0;
    double ata = 0.0;
    double qshr = 0.0;
    double rcr = 0.0;
    double pre_s = 0.0;
    double rec_s = 0.0;
    double f_score = 0.0;
    double speedup = 0.0;
    EvalCounts counts;

    [[nodiscard]] static EvalReport from_counts(const EvalCounts& c);
    /// key=value lines in a fixed order.
    [[nodiscard]] std::string to_key_values() const;
    /// Human-readable summary.
    [[nodiscard]] std::string to_text() const;
};

struct EvalInputs {
    std::span<const GroundTruthRecord> gt;
    std::optional<std::span<const Detection>> detections;
    std::optional<std::span<const TextStream>> streams;
    std::optional<std::span<const StreamDecision>> decisions;
    long recognitions_consumed = 0;
    long regions_total = 0;
};

[[nodiscard]] EvalCounts evaluate_counts(const EvalInputs& in, const MatchingConfig& cfg);
[[nodiscard]] EvalReport evaluate(const EvalInputs& in, const MatchingConfig& cfg);

/// GT records grouped by stream id, each sorted by frame.
[[nodiscard]] std::map<int, std::vector<GroundTruthRecord>> gt_streams(std::span<const GroundTruthRecord> gt);

}  // namespace vts::metrics
