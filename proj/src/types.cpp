#include "vts/types.hpp"

#include <numeric>

#include "vts/errors.hpp"

namespace vts {

double RecognitionHypothesis::mean_char_prob() const {
    if (char_probs.empty()) return 0.0;
    return std::accumulate(char_probs.begin(), char_probs.end(), 0.0) / double(char_probs.size());
}

void RecognitionHypothesis::validate() const {
    if (char_probs.size() != text.size() || char_features.size() != text.size()) {
        throw ContractError("RecognitionHypothesis: text, char_probs and char_features lengths differ");
    }
    for (double p : char_probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw ContractError("RecognitionHypothesis: char_prob outside [0,1]");
    }
}

const char* to_string(Language l) noexcept {
    return l == Language::Latin ? "Latin" : "NonLatin";
}

const char* to_string(Quality q) noexcept {
    switch (q) {
        case Quality::High: return "high";
        case Quality::Moderate: return "moderate";
        case Quality::Low: return "low";
    }
    return "low";
}

std::optional<Language> parse_language(const std::string& s) noexcept {
    if (s == "Latin") return Language::Latin;
    if (s == "NonLatin") return Language::NonLatin;
    return std::nullopt;
}

std::optional<Quality> parse_quality(const std::string& s) noexcept {
    if (s == "high") return Quality::High;
    if (s == "moderate") return Quality::Moderate;
    if (s == "low") return Quality::Low;
    return std::nullopt;
}

}  // namespace vts
