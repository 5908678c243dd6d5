#include "vts/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "vts/errors.hpp"

namespace vts::quality {

namespace {

double sq_dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

int feature_dim(std::span<const CharFeatures> fs) {
    for (const auto& f : fs) {
        for (const auto& row : f) {
            if (!row.empty()) return int(row.size());
        }
    }
    return 0;
}

double cosine(const Vec& a, const Vec& b) {
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa <= 0.0 || bb <= 0.0) throw ContractError("teacher_score: all-zero features");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

}  // namespace

Vec pad_flatten(const CharFeatures& f, int t_max, int dim) {
    Vec out(std::size_t(t_max) * std::size_t(dim), 0.0);
    const std::size_t rows = std::min(f.size(), std::size_t(t_max));
    for (std::size_t r = 0; r < rows; ++r) {
        if (f[r].size() != std::size_t(dim)) throw ContractError("pad_flatten: ragged character features");
        std::copy(f[r].begin(), f[r].end(), out.begin() + std::ptrdiff_t(r * std::size_t(dim)));
    }
    return out;
}

KMeansResult kmeans(std::span<const Vec> points, int k, int max_iterations) {
    if (points.empty()) throw ContractError("kmeans: no points");
    if (k < 1) throw ContractError("kmeans: k must be positive");
    const std::size_t n = points.size();
    const std::size_t kk = std::min(std::size_t(k), n);

    KMeansResult r;
    r.centroids.push_back(points[0]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (r.centroids.size() < kk) {
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], sq_dist(points[i], r.centroids.back()));
            if (nearest[i] > best) {
                best = nearest[i];
                far = i;
            }
        }
        r.centroids.push_back(points[far]);
    }

    r.labels.assign(n, -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int arg = 0;
            double best = sq_dist(points[i], r.centroids[0]);
            for (std::size_t c = 1; c < r.centroids.size(); ++c) {
                const double d = sq_dist(points[i], r.centroids[c]);
                if (d < best) {
                    best = d;
                    arg = int(c);
                }
            }
            if (r.labels[i] != arg) {
                r.labels[i] = arg;
                changed = true;
            }
        }
        std::vector<Vec> sums(r.centroids.size(), Vec(points[0].size(), 0.0));
        std::vector<int> counts(r.centroids.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[std::size_t(r.labels[i])];
            for (std::size_t d = 0; d < s.size(); ++d) s[d] += points[i][d];
            ++counts[std::size_t(r.labels[i])];
        }
        for (std::size_t c = 0; c < r.centroids.size(); ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (auto& x : sums[c]) x /= double(counts[c]);
            r.centroids[c] = std::move(sums[c]);
        }
        r.sizes = counts;
        if (!changed && it > 0) break;
    }
    return r;
}

Template estimate_template(std::span<const CharFeatures> correct_features, const RecommenderConfig& cfg) {
    if (correct_features.empty()) throw NoTemplateError("no correctly recognized features for the template");
    const int dim = feature_dim(correct_features);
    if (dim == 0) throw NoTemplateError("correct features are empty");
    std::vector<Vec> flat;
    flat.reserve(correct_features.size());
    for (const auto& f : correct_features) flat.push_back(pad_flatten(f, cfg.t_max, dim));

    const auto km = kmeans(flat, cfg.k_clusters);
    const auto largest = std::size_t(std::max_element(km.sizes.begin(), km.sizes.end()) - km.sizes.begin());
    const Vec& c = km.centroids[largest];

    Template t;
    t.source_count = int(correct_features.size());
    t.features.assign(std::size_t(cfg.t_max), Vec(std::size_t(dim), 0.0));
    for (std::size_t r = 0; r < t.features.size(); ++r) {
        std::copy_n(c.begin() + std::ptrdiff_t(r * std::size_t(dim)), dim, t.features[r].begin());
    }
    return t;
}

double teacher_score(const CharFeatures& region_features, const Template& tmpl, int t_max) {
    if (tmpl.features.empty() || tmpl.features[0].empty()) throw ContractError("teacher_score: empty template");
    const int dim = int(tmpl.features[0].size());
    return cosine(pad_flatten(tmpl.features, t_max, dim), pad_flatten(region_features, t_max, dim));
}

TeacherResult teacher_scores(const TextStream& stream, const std::string& transcript, const RecommenderConfig& cfg) {
    TeacherResult r;
    std::vector<CharFeatures> correct;
    for (const auto& o : stream.observations) {
        if (o.hypothesis && o.hypothesis->text == transcript) correct.push_back(o.hypothesis->char_features);
    }
    r.correct_count = int(correct.size());
    r.scores.assign(stream.observations.size(), 0.0);
    if (correct.empty()) {
        r.used_fallback = true;
        for (std::size_t i = 0; i < stream.observations.size(); ++i) {
            const auto& h = stream.observations[i].hypothesis;
            if (h) r.scores[i] = h->mean_char_prob();
        }
        return r;
    }
    const Template t = estimate_template(correct, cfg);
    for (std::size_t i = 0; i < stream.observations.size(); ++i) {
        const auto& h = stream.observations[i].hypothesis;
        if (!h || h->char_features.empty()) continue;
        try {
            r.scores[i] = teacher_score(h->char_features, t, cfg.t_max);
        } catch (const ContractError&) {
            r.scores[i] = 0.0;
        }
    }
    return r;
}

double PassthroughStudent::predict(const RegionObservation& obs) const {
    if (!obs.teacher_score) throw ContractError("passthrough student: observation has no teacher score");
    return *obs.teacher_score;
}

double RidgeStudent::predict(const RegionObservation& obs) const {
    return predict(obs.embedding);
}

double RidgeStudent::predict(std::span<const double> embedding) const {
    if (!fitted_) throw ContractError("student model is not fitted");
    if (embedding.size() != weights_.size()) throw ContractError("student model: embedding dimension mismatch");
    double s = intercept_;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * embedding[i];
    return s;
}

std::string RidgeStudent::to_json() const {
    if (!fitted_) throw ContractError("student model is not fitted");
    nlohmann::json j{{"kind", "ridge"}, {"intercept", intercept_}, {"weights", weights_}};
    return j.dump() + "\n";
}

RidgeStudent RidgeStudent::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("kind").get<std::string>() != "ridge") throw ContractError("student model: unknown kind");
        return RidgeStudent(j.at("weights").get<Vec>(), j.at("intercept").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("student model: ") + e.what());
    }
}

RidgeStudent fit_student(std::span<const TrainingSample> training, double ridge_lambda) {
    if (ridge_lambda < 0.0) throw ContractError("fit_student: ridge_lambda must be non-negative");
    if (training.empty()) throw ContractError("fit_student: no training samples");
    const std::size_t n = training.size();
    const std::size_t d = training[0].embedding.size();
    for (const auto& s : training) {
        if (s.embedding.size() != d) throw ContractError("fit_student: embedding dimension mismatch");
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(Eigen::Index(i), Eigen::Index(j)) = training[i].embedding[j];
        y(Eigen::Index(i)) = training[i].teacher_score;
    }
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;

    const double inv_n = 1.0 / double(n);
    Eigen::MatrixXd a = inv_n * (xc.transpose() * xc);
    a.diagonal().array() += ridge_lambda;
    const Eigen::VectorXd b = inv_n * (xc.transpose() * yc);
    const Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(b);

    Vec weights(d);
    for (std::size_t j = 0; j < d; ++j) weights[j] = w(Eigen::Index(j));
    const double intercept = y_mean - x_mean.dot(w);
    return RidgeStudent(std::move(weights), intercept);
}

const char* to_string(SelectionPolicy p) noexcept {
    switch (p) {
        case SelectionPolicy::TR: return "tr";
        case SelectionPolicy::PCW: return "pcw";
        case SelectionPolicy::HFP: return "hfp";
    }
    return "tr";
}

std::optional<SelectionPolicy> parse_policy(const std::string& s) noexcept {
    if (s == "tr" || s == "TR") return SelectionPolicy::TR;
    if (s == "pcw" || s == "PCW") return SelectionPolicy::PCW;
    if (s == "hfp" || s == "HFP") return SelectionPolicy::HFP;
    return std::nullopt;
}

namespace {

[[noreturn]] void unavailable(const TextStream& s, const char* policy, const char* field) {
    throw PolicyUnavailableError(std::string("policy ") + policy + " unavailable for stream " + std::to_string(s.id) +
                                 ": an observation lacks " + field);
}

// Earliest-frame argmax; observations are frame-ordered so the first maximum wins.
std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace

StreamDecision select(const TextStream& stream, SelectionPolicy policy) {
    if (stream.observations.empty()) throw ContractError("select: empty stream " + std::to_string(stream.id));
    const auto& obs = stream.observations;
    for (const auto& o : obs) {
        if (!o.hypothesis) unavailable(stream, to_string(policy), "a recognition hypothesis");
        if (policy == SelectionPolicy::TR && !o.student_score) unavailable(stream, "tr", "a student score");
    }

    std::size_t chosen = 0;
    double score = 0.0;
    switch (policy) {
        case SelectionPolicy::TR: {
            std::vector<double> s;
            for (const auto& o : obs) s.push_back(*o.student_score);
            chosen = argmax(s);
            score = s[chosen];
            break;
        }
        case SelectionPolicy::PCW: {
            std::vector<double> s;
            for (const auto& o : obs) s.push_back(o.hypothesis->mean_char_prob());
            chosen = argmax(s);
            score = s[chosen];
            break;
        }
        case SelectionPolicy::HFP: {
            struct Tally {
                int count = 0;
                double prob_sum = 0.0;
                std::size_t first = 0;
            };
            std::map<std::string, Tally> tally;
            for (std::size_t i = 0; i < obs.size(); ++i) {
                auto [it, fresh] = tally.try_emplace(obs[i].hypothesis->text);
                if (fresh) it->second.first = i;
                ++it->second.count;
                it->second.prob_sum += obs[i].hypothesis->mean_char_prob();
            }
            const Tally* best = nullptr;
            for (const auto& [text, t] : tally) {
                if (best == nullptr || t.count > best->count) {
                    best = &t;
                    continue;
                }
                if (t.count < best->count) continue;
                const double m = t.prob_sum / t.count;
                const double mb = best->prob_sum / best->count;
                if (m > mb || (m == mb && t.first < best->first)) best = &t;
            }
            chosen = best->first;
            score = double(best->count) / double(obs.size());
            break;
        }
    }

    const auto& o = obs[chosen];
    return StreamDecision{stream.id, o.frame, o.quad, o.hypothesis->text, score};
}

}  // namespace vts::quality
