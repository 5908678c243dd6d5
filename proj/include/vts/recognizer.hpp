#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vts/types.hpp"

namespace vts {

/// Error model for the synthetic recognizer.
struct ErrorModel {
    double substitution_prob = 0.0;  ///< per character
    double feature_noise = 0.0;      ///< stddev of Gaussian noise added to each feature component
    double prob_noise = 0.0;         ///< stddev of the half-normal deficit subtracted from char_probs
    /// Probability multiplier applied to substituted characters; values below 1 make
    /// the recognizer less confident about its mistakes.
    double substituted_prob_scale = 1.0;
    std::vector<std::size_t> forced_substitutions;  ///< positions always substituted
    /// When set, the replacement for position i is a fixed function of (seed, i), so degraded
    /// views of the same text tend to be misread the same way.
    std::optional<std::uint64_t> systematic_seed;
    /// With a systematic seed, the fraction of substitution decisions taken from a fixed
    /// per-position draw instead of a fresh one. The per-character substitution
    /// probability is unchanged; only the correlation between calls grows.
    double systematic_share = 0.0;
    int feature_dim = 16;
};

/// One generator event, recorded when a trace is requested.
struct RecognizerEvent {
    std::size_t position;
    char original;
    char emitted;
};

/// Deterministic unit vector for a character, seeded from a hash of its code.
[[nodiscard]] Vec char_anchor(char c, int dim);

/// Characters a recognizer may confuse `c` with. Always non-empty and never contains `c`.
[[nodiscard]] std::vector<char> confusable(char c);

/// Desk-scale stand-in for an attention decoder: emits a hypothesis for `gt_text` under
/// `model`, deterministic in `seed`.
[[nodiscard]] RecognitionHypothesis synthetic_recognizer(const std::string& gt_text, const ErrorModel& model,
                                                         std::uint64_t seed,
                                                         std::vector<RecognizerEvent>* trace = nullptr);

/// SplitMix64 step; used to derive independent sub-seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace vts
