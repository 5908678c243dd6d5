#pragma once

#include <span>
#include <string>
#include <vector>

#include "vts/assignment.hpp"
#include "vts/types.hpp"

namespace vts::tracker {

struct TrackerConfig {
    double mc_epsilon = 1e-7;
    /// Cosine-similarity floor for a valid pair (equivalently MC <= 1/(threshold + eps)).
    double similarity_threshold = 0.92;
    int max_gap = 3;
    int embedding_dim = 128;
    /// Match against the mean of the stream's normalized embeddings instead of the latest one.
    bool use_mean_embedding = false;

    void validate() const;
};

[[nodiscard]] Vec normalize(std::span<const double> v);
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);

/// Reciprocal-dot matching cost 1/(q1.q2 + eps).
[[nodiscard]] double matching_cost(std::span<const double> q1, std::span<const double> q2, double eps = 1e-7);

[[nodiscard]] bool valid_pair(std::span<const double> q1, std::span<const double> q2, const TrackerConfig& cfg);

struct Rejection {
    std::size_t input_index;
    std::string reason;
};

struct TrackResult {
    std::vector<TextStream> streams;  ///< ordered by id; ids start at 1
    std::vector<Rejection> rejected;
};

/// Associates observations into streams frame by frame. Input order within a frame
/// decides the ids of streams born in that frame.
[[nodiscard]] TrackResult track(std::span<const RegionObservation> observations, const TrackerConfig& cfg);

}  // namespace vts::tracker
