#include "vts/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vts {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Vec char_anchor(char c, int dim) {
    // FNV-1a over the byte, then a private generator.
    std::uint64_t h = 1469598103934665603ULL;
    h ^= std::uint8_t(c);
    h *= 1099511628211ULL;
    std::mt19937_64 rng(mix_seed(h, 0xA11C0DE));
    std::normal_distribution<double> n01(0.0, 1.0);
    Vec v(std::size_t(std::max(dim, 1)));
    double norm2 = 0.0;
    for (auto& x : v) {
        x = n01(rng);
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

std::vector<char> confusable(char c) {
    // Neighbouring codes inside the printable range stand in for visually similar glyphs.
    std::vector<char> out;
    const int code = static_cast<unsigned char>(c);
    for (int d : {1, -1, 2}) {
        int k = code + d;
        if (k < 33) k += 94;
        if (k > 126) k -= 94;
        if (k != code && std::find(out.begin(), out.end(), char(k)) == out.end()) out.push_back(char(k));
    }
    return out;
}

RecognitionHypothesis synthetic_recognizer(const std::string& gt_text, const ErrorModel& model, std::uint64_t seed,
                                           std::vector<RecognizerEvent>* trace) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01(0.0, 1.0);

    RecognitionHypothesis hyp;
    hyp.text.reserve(gt_text.size());
    for (std::size_t i = 0; i < gt_text.size(); ++i) {
        const char orig = gt_text[i];
        const bool forced = std::find(model.forced_substitutions.begin(), model.forced_substitutions.end(), i) !=
                            model.forced_substitutions.end();
        // Draws happen unconditionally so the stream of random numbers does not depend on outcomes.
        double coin = u01(rng);
        const double pick = u01(rng);
        const double share = u01(rng);
        if (model.systematic_seed && share < model.systematic_share) {
            // A per-position draw shared by every call with this seed; still uniform on [0,1).
            coin = double(mix_seed(*model.systematic_seed, i + 0x9E3779B9ULL) >> 11) * 0x1.0p-53;
        }
        const bool substitute = forced || coin < model.substitution_prob;
        char out = orig;
        if (substitute) {
            const auto alts = confusable(orig);
            const std::size_t k = model.systematic_seed ? std::size_t(mix_seed(*model.systematic_seed, i) % alts.size())
                                                        : std::min(alts.size() - 1, std::size_t(pick * double(alts.size())));
            out = alts[k];
            if (trace != nullptr) trace->push_back({i, orig, out});
        }
        hyp.text.push_back(out);

        double p = 1.0 - std::abs(n01(rng)) * model.prob_noise;
        if (substitute) p *= model.substituted_prob_scale;
        hyp.char_probs.push_back(std::clamp(p, 0.0, 1.0));

        Vec feat = char_anchor(out, model.feature_dim);
        for (auto& x : feat) x += model.feature_noise * n01(rng);
        hyp.char_features.push_back(std::move(feat));
    }
    return hyp;
}

}  // namespace vts
