#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vts/assignment.hpp"
#include "vts/providers.hpp"
#include "vts/types.hpp"

namespace vts::simkit {

/// Per-frame latent quality u in [0,1] along a stream, mapped to a quality level and a
/// noise scale (1 - u).
struct QualityProfile {
    enum class Kind { Flat, Bump };
    Kind kind = Kind::Bump;
    double flat_value = 1.0;  ///< u for Kind::Flat
    double peak_min = 0.55;   ///< bump: peak height drawn from [peak_min, peak_max]
    double peak_max = 1.0;
    double base_min = 0.0;    ///< bump: baseline drawn from [base_min, base_max]
    double base_max = 0.35;
    double width_fraction = 0.3;  ///< bump half-width as a fraction of stream length
    double high_threshold = 0.75;
    double moderate_threshold = 0.45;

    [[nodiscard]] Quality level(double u) const noexcept;
};

struct RecognizerErrorSpec {
    double high = 0.02;  ///< per-character substitution probability by quality level
    double moderate = 0.15;
    double low = 0.6;
    double prob_noise_base = 0.02;
    double prob_noise_gain = 0.3;  ///< extra char-prob noise at u = 0
    double substituted_prob_scale = 1.0;  ///< recognizer is as confident about its mistakes as about correct reads
    bool systematic = true;  ///< misreadings of a stream repeat the same replacement characters
    double systematic_share = 0.7;  ///< how often a stream's frames share which characters are misread

    [[nodiscard]] double substitution(Quality q) const noexcept;
};

struct ScenarioSpec {
    int n_streams = 4;
    int frames_min = 5;
    int frames_max = 12;
    int start_spread = 10;  ///< stream start frame drawn from [0, start_spread]
    QualityProfile profile;
    RecognizerErrorSpec recognizer_error;
    double identity_separation_deg = 90.0;
    int embedding_dim = 128;
    int char_feature_dim = 16;
    double embedding_noise = 0.15;     ///< noise norm at u = 0
    double degradation_gain = 0.35;    ///< shared degradation direction magnitude at u = 0
    double char_noise_max = 0.25;      ///< char-feature noise stddev at u = 0
    double quad_jitter = 2.0;          ///< observation polygon jitter (px) at u = 0
    int word_min = 3;
    int word_max = 8;
    // Layout: one horizontal lane per stream, global pan of `pan_cells_per_frame` cells.
    double cell_stride = 4.0;
    int image_width = 640;
    int lane_height = 24;
    int text_height = 16;
    int text_width_min = 48;
    int text_width_max = 96;
    int pan_cells_per_frame = -1;
    int feature_channels = 4;
    double feature_amplitude = 3.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ObservationLabel {
    int stream_id = 0;
    Quality quality = Quality::High;
    double u = 1.0;
};

struct Scenario {
    ScenarioSpec spec;
    std::vector<GroundTruthRecord> gt;          ///< sorted by (frame, id)
    std::vector<RegionObservation> observations;  ///< sorted by (frame, stream id)
    std::vector<ObservationLabel> labels;        ///< parallel to observations
    std::map<int, std::string> transcripts;      ///< GT stream id -> transcript
    int n_frames = 0;
    int image_width = 0;
    int image_height = 0;

    [[nodiscard]] int grid_width() const noexcept;
    [[nodiscard]] int grid_height() const noexcept;
};

/// Deterministic in spec.seed.
[[nodiscard]] Scenario generate(const ScenarioSpec& spec);

/// Keeps the streams whose fraction of high-quality frames is at most `max_high_fraction`.
[[nodiscard]] Scenario extreme_filter(const Scenario& scenario, double max_high_fraction);

/// Fraction of high-quality records per GT stream.
[[nodiscard]] std::map<int, double> high_fractions(const Scenario& scenario);

/// Renders features, confidences and geometry offsets for each frame on demand.
class SyntheticFrameProvider final : public FrameProvider {
public:
    explicit SyntheticFrameProvider(const Scenario& scenario);
    [[nodiscard]] int frame_count() const override { return scenario_->n_frames; }
    [[nodiscard]] TensorGrid features(int frame) const override;
    [[nodiscard]] TensorGrid confidence(int frame) const override;
    [[nodiscard]] TensorGrid geometry(int frame) const override;

private:
    template <typename Fn>
    void for_each_text_cell(int frame, Fn&& fn) const;

    const Scenario* scenario_;
    std::map<int, std::vector<std::size_t>> gt_by_frame_;
};

[[nodiscard]] UniformFlowProvider flow_provider(const Scenario& scenario);

/// Exhaustive minimum over injective row->column maps (or column->row when rows > cols),
/// summed in row order. Both sides at most 8.
[[nodiscard]] double brute_force_assignment(const CostMatrix& cost);

/// Writes gt.tsv, observations.jsonl, labels.tsv, scenario.json, frames/ and flows/.
void write_scenario(const std::filesystem::path& dir, const Scenario& scenario, int flow_window = 2);

/// Reads/writes a ScenarioSpec as JSON; unknown keys are rejected.
[[nodiscard]] ScenarioSpec spec_from_json(const std::string& text);
[[nodiscard]] std::string spec_to_json(const ScenarioSpec& spec);

}  // namespace vts::simkit
