#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vts/geometry.hpp"

namespace vts {

using Vec = std::vector<double>;

/// Rows-by-d matrix of per-character feature vectors.
using CharFeatures = std::vector<Vec>;

struct RecognitionHypothesis {
    std::string text;
    std::vector<double> char_probs;
    CharFeatures char_features;

    [[nodiscard]] double mean_char_prob() const;
    /// Throws ContractError unless |text| == |char_probs| == rows(char_features) and probs in [0,1].
    void validate() const;
};

struct RegionObservation {
    int frame = 0;
    Quad quad;
    Vec embedding;
    std::optional<RecognitionHypothesis> hypothesis;
    std::optional<double> teacher_score;
    std::optional<double> student_score;
};

enum class Language { Latin, NonLatin };
enum class Quality { High, Moderate, Low };

[[nodiscard]] const char* to_string(Language l) noexcept;
[[nodiscard]] const char* to_string(Quality q) noexcept;
[[nodiscard]] std::optional<Language> parse_language(const std::string& s) noexcept;
[[nodiscard]] std::optional<Quality> parse_quality(const std::string& s) noexcept;

struct GroundTruthRecord {
    int frame = 0;
    int id = 0;
    Quad quad;
    Language language = Language::Latin;
    Quality quality = Quality::High;
    std::string transcript;
};

struct Detection {
    int frame = 0;
    ScoredQuad region;
};

struct TextStream {
    int id = 0;
    std::vector<RegionObservation> observations;
    int last_active_frame = 0;
};

struct StreamDecision {
    int stream_id = 0;
    int chosen_frame = 0;
    Quad chosen_quad;
    std::string final_text;
    double quality_score = 0.0;
};

}  // namespace vts
