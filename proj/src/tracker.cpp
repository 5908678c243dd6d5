#include "vts/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "vts/errors.hpp"

namespace vts::tracker {

void TrackerConfig::validate() const {
    if (!(mc_epsilon > 0.0)) throw ContractError("tracker: mc_epsilon must be positive");
    if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0)) {
        throw ContractError("tracker: similarity_threshold must lie in (0,1)");
    }
    if (max_gap < 0) throw ContractError("tracker: max_gap must be non-negative");
    if (embedding_dim <= 0) throw ContractError("tracker: embedding_dim must be positive");
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vec normalize(std::span<const double> v) {
    const double n = std::sqrt(dot(v, v));
    if (!(n > 0.0) || !std::isfinite(n)) throw ContractError("normalize: vector has zero or non-finite norm");
    Vec out(v.begin(), v.end());
    for (auto& x : out) x /= n;
    return out;
}

double matching_cost(std::span<const double> q1, std::span<const double> q2, double eps) {
    return 1.0 / (dot(q1, q2) + eps);
}

bool valid_pair(std::span<const double> q1, std::span<const double> q2, const TrackerConfig& cfg) {
    const double d = dot(q1, q2);
    return d > 0.0 && d >= cfg.similarity_threshold;
}

namespace {

struct Live {
    TextStream stream;
    Vec last;  ///< latest normalized embedding
    Vec sum;   ///< sum of normalized embeddings
};

Vec reference_embedding(const Live& s, bool use_mean) {
    if (!use_mean) return s.last;
    return normalize(s.sum);
}

}  // namespace

TrackResult track(std::span<const RegionObservation> observations, const TrackerConfig& cfg) {
    cfg.validate();
    TrackResult result;

    std::vector<std::size_t> order;
    std::vector<Vec> unit(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& o = observations[i];
        if (o.frame < 0) {
            result.rejected.push_back({i, "negative frame index"});
            continue;
        }
        try {
            unit[i] = normalize(o.embedding);
        } catch (const ContractError&) {
            result.rejected.push_back({i, "embedding has zero norm at frame " + std::to_string(o.frame)});
            continue;
        }
        if (order.empty() || unit[i].size() == unit[order.front()].size()) {
            order.push_back(i);
        } else {
            result.rejected.push_back({i, "embedding dimension differs from earlier observations"});
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return observations[a].frame < observations[b].frame; });

    std::vector<Live> live;
    int next_id = 1;
    std::size_t k = 0;
    while (k < order.size()) {
        const int frame = observations[order[k]].frame;
        std::vector<std::size_t> cols;
        while (k < order.size() && observations[order[k]].frame == frame) cols.push_back(order[k++]);

        std::vector<std::size_t> active;
        for (std::size_t s = 0; s < live.size(); ++s) {
            if (live[s].stream.last_active_frame >= frame - cfg.max_gap && live[s].stream.last_active_frame < frame) {
                active.push_back(s);
            }
        }

        CostMatrix cost(active.size(), cols.size(), kForbiddenCost);
        const auto n_rows = std::int64_t(active.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t r = 0; r < n_rows; ++r) {
            const Vec ref = reference_embedding(live[active[std::size_t(r)]], cfg.use_mean_embedding);
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const Vec& q = unit[cols[c]];
                if (valid_pair(ref, q, cfg)) cost(std::size_t(r), c) = matching_cost(ref, q, cfg.mc_epsilon);
            }
        }

        std::vector<char> taken(cols.size(), 0);
        for (const auto& [r, c] : assign(cost)) {
            Live& s = live[active[r]];
            const std::size_t idx = cols[c];
            s.stream.observations.push_back(observations[idx]);
            s.stream.last_active_frame = frame;
            s.last = unit[idx];
            for (std::size_t d = 0; d < s.sum.size(); ++d) s.sum[d] += unit[idx][d];
            taken[c] = 1;
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (taken[c]) continue;
            const std::size_t idx = cols[c];
            Live s;
            s.stream.id = next_id++;
            s.stream.observations.push_back(observations[idx]);
            s.stream.last_active_frame = frame;
            s.last = unit[idx];
            s.sum = unit[idx];
            live.push_back(std::move(s));
        }
    }

    result.streams.reserve(live.size());
    for (auto& s : live) result.streams.push_back(std::move(s.stream));
    return result;
}

}  // namespace vts::tracker
